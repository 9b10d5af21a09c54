"""Characteristic exponents phi(t, lambda) and expansion-coefficient extraction.

Bundled models: Black-Scholes, Merton jump diffusion, Variance Gamma and
Heston. Each model is an immutable object exposing ``phi(t, lam)`` with the
martingale normalisation phi(t, -i) = 0, plus an analyticity strip hint
(admissible range of Im(lambda)) used by the Fourier pricer and the Taylor
coefficient extractor.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ContourViolation, DomainViolation, IoFailure, NonConvergence

_INF = math.inf


def phi_bs(lam: complex, sigma0: float) -> complex:
    """Per-unit-time Brownian exponent -sigma0^2 (lam^2 + i lam) / 2."""
    if not (sigma0 > 0.0):
        raise DomainViolation(f"volatility must be positive, got sigma0={sigma0}")
    return -0.5 * sigma0 * sigma0 * (lam * lam + 1j * lam)


@dataclass(frozen=True)
class ExpansionCoefficients:
    """Taylor coefficients a_2..a_m of the perturbation exponent at lambda = 0."""

    t: float
    sigma0: float
    a: np.ndarray  # a[0] = a_2, ..., a[m-2] = a_m

    @property
    def m(self) -> int:
        return len(self.a) + 1

    def coeff(self, k: int) -> float:
        """a_k for 2 <= k <= m."""
        if not (2 <= k <= self.m):
            raise DomainViolation(f"coefficient index {k} outside [2, {self.m}]")
        return float(self.a[k - 2])


class CharacteristicModel:
    """Interface: a characteristic exponent with martingale normalisation."""

    name: str = "abstract"
    #: admissible open interval for Im(lambda); (-inf, inf) if unrestricted
    strip: tuple[float, float] = (-_INF, _INF)

    def phi(self, t: float, lam: complex) -> complex:
        raise NotImplementedError

    def params(self) -> dict:
        raise NotImplementedError

    def to_json(self) -> str:
        return json.dumps({"model": self.name, "params": self.params()})


@dataclass(frozen=True)
class BlackScholesModel(CharacteristicModel):
    """Geometric Brownian motion with volatility ``sigma``."""

    sigma: float
    name: str = field(default="black-scholes", init=False)

    def __post_init__(self):
        if not (self.sigma > 0.0):
            raise DomainViolation(f"sigma must be positive, got {self.sigma}")

    def phi(self, t: float, lam: complex) -> complex:
        return t * phi_bs(lam, self.sigma)

    def params(self) -> dict:
        return {"sigma": self.sigma}


@dataclass(frozen=True)
class MertonModel(CharacteristicModel):
    """Jump diffusion: diffusion ``a`` plus Gaussian jumps N(m, s^2) at rate ``alpha``.

    The drift is not free; it is fixed by the martingale condition.
    """

    a: float
    m: float
    s: float
    alpha: float
    name: str = field(default="merton", init=False)

    def __post_init__(self):
        if not (self.alpha > 0.0 and self.s > 0.0 and self.a >= 0.0):
            raise DomainViolation(
                f"need alpha > 0, s > 0, a >= 0; got alpha={self.alpha}, s={self.s}, a={self.a}"
            )

    def _drift(self) -> float:
        # martingale condition with the jump compensator folded into the drift
        return -0.5 * self.a * self.a - self.alpha * (
            math.exp(self.m + 0.5 * self.s * self.s) - 1.0
        )

    def phi(self, t: float, lam: complex) -> complex:
        jump = self.alpha * (
            cmath.exp(1j * self.m * lam - 0.5 * self.s * self.s * lam * lam) - 1.0
        )
        return t * (1j * self._drift() * lam - 0.5 * self.a * self.a * lam * lam + jump)

    def params(self) -> dict:
        return {"a": self.a, "m": self.m, "s": self.s, "alpha": self.alpha}


@dataclass(frozen=True)
class VarianceGammaModel(CharacteristicModel):
    """Infinite-activity pure-jump model with exponential tails G (left), M (right).

    ``M > 1`` is required so that exp(X) has a finite mean. The diffusion
    component is zero, the standard convention for infinite-activity models.
    """

    alpha: float
    G: float
    M: float
    name: str = field(default="variance-gamma", init=False)

    def __post_init__(self):
        if not (self.alpha > 0.0 and self.G > 0.0 and self.M > 1.0):
            raise DomainViolation(
                f"need alpha > 0, G > 0, M > 1; got alpha={self.alpha}, G={self.G}, M={self.M}"
            )

    @property
    def strip(self) -> tuple[float, float]:  # type: ignore[override]
        return (-self.M, self.G)

    def _drift(self) -> float:
        # martingale condition: phi(t, -i) = 0
        return self.alpha * (math.log(1.0 - 1.0 / self.M) + math.log(1.0 + 1.0 / self.G))

    def phi(self, t: float, lam: complex) -> complex:
        if not (-self.M < lam.imag < self.G):
            raise ContourViolation(
                f"Im(lambda)={lam.imag} outside VG strip (-{self.M}, {self.G})"
            )
        jumps = self.alpha * (
            -cmath.log(1.0 - 1j * lam / self.M) - cmath.log(1.0 + 1j * lam / self.G)
        )
        return t * (1j * self._drift() * lam + jumps)

    def params(self) -> dict:
        return {"alpha": self.alpha, "G": self.G, "M": self.M}


@dataclass(frozen=True)
class HestonParams:
    """Mean-reversion kappa, long-run variance theta, vol-of-vol delta,
    correlation rho, initial variance y."""

    kappa: float
    theta: float
    delta: float
    rho: float
    y: float

    def __post_init__(self):
        if not (self.kappa > 0.0 and self.theta > 0.0 and self.delta > 0.0
                and self.y > 0.0 and -1.0 <= self.rho <= 1.0):
            raise DomainViolation(f"invalid Heston parameters {self!r}")


@dataclass(frozen=True)
class HestonModel(CharacteristicModel):
    """Square-root stochastic variance; exponent C(t, lam) + y D(t, lam)."""

    p: HestonParams
    name: str = field(default="heston", init=False)

    def phi(self, t: float, lam: complex) -> complex:
        kappa, theta, delta, rho, y = (
            self.p.kappa, self.p.theta, self.p.delta, self.p.rho, self.p.y,
        )
        beta = kappa - 1j * rho * delta * lam
        d = cmath.sqrt(delta * delta * (lam * lam + 1j * lam) + beta * beta)
        if d.real < 0.0:
            # keep the branch with nonnegative real part: avoids crossings of
            # the complex logarithm for all maturities of interest
            d = -d
        gamma = (beta - d) / (beta + d)
        exp_dt = cmath.exp(-d * t)
        log_term = cmath.log((1.0 - gamma * exp_dt) / (1.0 - gamma))
        c_fn = kappa * theta / (delta * delta) * ((beta - d) * t - 2.0 * log_term)
        d_fn = (beta - d) / (delta * delta) * (1.0 - exp_dt) / (1.0 - gamma * exp_dt)
        value = c_fn + y * d_fn
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise ContourViolation(
                f"Heston exponent not finite at t={t}, lambda={lam} (outside moment strip)"
            )
        return value

    def params(self) -> dict:
        return {"kappa": self.p.kappa, "theta": self.p.theta, "delta": self.p.delta,
                "rho": self.p.rho, "y": self.p.y}


def phi_merton(t: float, lam: complex, model: MertonModel) -> complex:
    """Merton exponent at (t, lambda); drift fixed by the martingale condition."""
    return model.phi(t, lam)


def phi_vg(t: float, lam: complex, model: VarianceGammaModel) -> complex:
    """Variance Gamma exponent; requires Im(lambda) in (-M, G)."""
    return model.phi(t, lam)


def phi_heston(t: float, lam: complex, params: HestonParams) -> complex:
    """Heston exponent C + y D with the branch-stable formulation."""
    return HestonModel(params).phi(t, lam)


# -- jump-measure moments and closed-form coefficients ------------------------

def _norm_pdf(v: float) -> float:
    return math.exp(-0.5 * v * v) / math.sqrt(2.0 * math.pi)


def _norm_cdf(v: float) -> float:
    return 0.5 * math.erfc(-v / math.sqrt(2.0))


def _gaussian_raw_moment(m: float, s: float, n: int) -> float:
    # E[Z^n] for Z ~ N(m, s^2), via the Hermite-free binomial identity
    total = 0.0
    for j in range(0, n + 1, 2):
        # central moment of order j: s^j (j-1)!!
        central = s ** j * math.prod(range(j - 1, 0, -2)) if j > 0 else 1.0
        total += math.comb(n, j) * central * m ** (n - j)
    return total


def levy_moments(model: CharacteristicModel, n_max: int) -> np.ndarray:
    """Moments of the jump measure: I_1 over |z| >= 1, I_n = int z^n nu(dz) for n >= 2.

    Returns an array [I_1, I_2, ..., I_n_max].
    """
    if n_max < 2:
        raise DomainViolation(f"n_max must be >= 2, got {n_max}")
    out = np.empty(n_max)
    if isinstance(model, MertonModel):
        m, s, alpha = model.m, model.s, model.alpha
        lo, hi = (-1.0 - m) / s, (1.0 - m) / s
        inner = m * (_norm_cdf(hi) - _norm_cdf(lo)) - s * (_norm_pdf(hi) - _norm_pdf(lo))
        out[0] = alpha * (m - inner)
        for n in range(2, n_max + 1):
            out[n - 1] = alpha * _gaussian_raw_moment(m, s, n)
    elif isinstance(model, VarianceGammaModel):
        alpha, G, M = model.alpha, model.G, model.M
        out[0] = alpha * (math.exp(-M) / M - math.exp(-G) / G)
        for n in range(2, n_max + 1):
            out[n - 1] = alpha * math.factorial(n - 1) * (
                M ** (-n) + (-1) ** n * G ** (-n)
            )
    else:
        raise DomainViolation(f"no jump-moment formula for model '{model.name}'")
    if not np.all(np.isfinite(out)):
        raise DomainViolation("jump-measure moment is not finite")
    return out


def levy_coefficients(model: CharacteristicModel, t: float, sigma0: float,
                      m: int) -> ExpansionCoefficients:
    """Closed-form coefficients for a jump-diffusion exponent:

    a_2 = t (a^2 - sigma0^2 + I_2) / 2, a_n = t I_n / n! for n >= 3.
    """
    if m < 2:
        raise DomainViolation(f"truncation order m must be >= 2, got {m}")
    if not (t > 0.0 and sigma0 > 0.0):
        raise DomainViolation(f"need t > 0 and sigma0 > 0, got t={t}, sigma0={sigma0}")
    moments = levy_moments(model, max(m, 2))
    diffusion = model.a if isinstance(model, MertonModel) else 0.0
    a = np.empty(m - 1)
    a[0] = 0.5 * t * (diffusion * diffusion - sigma0 * sigma0 + moments[1])
    for n in range(3, m + 1):
        a[n - 2] = t * moments[n - 1] / math.factorial(n)
    return ExpansionCoefficients(t=t, sigma0=sigma0, a=a)


def heston_a2(t: float, sigma0: float, p: HestonParams) -> float:
    """Closed-form second coefficient of the Heston perturbation exponent."""
    if not (t > 0.0 and sigma0 > 0.0):
        raise DomainViolation(f"need t > 0 and sigma0 > 0, got t={t}, sigma0={sigma0}")
    kappa, theta, delta, rho, y = p.kappa, p.theta, p.delta, p.rho, p.y
    kt = kappa * t
    term1 = math.exp(-2.0 * kt) / (16.0 * kappa ** 3) * (
        4.0 * math.exp(kt) * (
            2.0 * (theta - y) * kappa ** 2
            + 2.0 * (y + y * kt - theta * (2.0 + kt)) * kappa * rho * delta
            + (theta + (theta - y) * kt) * delta ** 2
        )
        - (2.0 * y - theta) * delta ** 2
    )
    term2 = (
        8.0 * kappa ** 2 * (y + (kt - 1.0) * theta)
        - 8.0 * (y + theta * (kt - 2.0)) * kappa * rho * delta
        - ((5.0 - 2.0 * kt) * theta - 2.0 * y) * delta ** 2
    ) / (16.0 * kappa ** 3)
    return term1 + term2 - 0.5 * sigma0 ** 2 * t


# -- Taylor coefficients by contour integration --------------------------------

_DEFAULT_RADIUS = 0.5
_DEFAULT_NODES = 128
_EXTRACTOR_RTOL = 1e-7


def taylor_coefficients(func: Callable[[complex], complex], m: int,
                        radius: float, n_nodes: int = _DEFAULT_NODES) -> np.ndarray:
    """Derivative coefficients f^(k)(0)/k! for k = 1..m via the trapezoid rule
    on a circle of the given radius (spectrally accurate for analytic f)."""
    angles = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
    nodes = radius * np.exp(1j * angles)
    try:
        values = np.array([func(z) for z in nodes])
    except (ContourViolation, OverflowError) as exc:
        raise ContourViolation(f"exponent evaluation failed on extraction circle: {exc}")
    if not np.all(np.isfinite(values)):
        raise ContourViolation("exponent not finite on extraction circle")
    spectrum = np.fft.fft(values) / n_nodes
    ks = np.arange(1, m + 1)
    return spectrum[1:m + 1] / radius ** ks.astype(float)


def generic_coefficients(model: CharacteristicModel, t: float, sigma0: float,
                         m: int, radius: float | None = None,
                         n_nodes: int = _DEFAULT_NODES,
                         rtol: float = _EXTRACTOR_RTOL) -> ExpansionCoefficients:
    """Coefficients a_k = (-i)^k d^k/dlam^k [phi(t, .) - t phi_bs(.)] / k! at 0,
    computed by contour integration with a two-radius consistency check.

    The circle radius defaults to 0.5, shrunk to half the distance to the
    nearest analyticity bound when the model restricts Im(lambda).
    """
    if m < 2:
        raise DomainViolation(f"truncation order m must be >= 2, got {m}")
    if not (t > 0.0 and sigma0 > 0.0):
        raise DomainViolation(f"need t > 0 and sigma0 > 0, got t={t}, sigma0={sigma0}")
    if radius is None:
        lo, hi = model.strip
        bound = min(abs(lo), abs(hi))
        radius = min(_DEFAULT_RADIUS, 0.5 * bound) if math.isfinite(bound) else _DEFAULT_RADIUS

    def phi1(lam: complex) -> complex:
        return model.phi(t, lam) - t * phi_bs(lam, sigma0)

    ks = np.arange(1, m + 1)
    rotation = (-1j) ** ks
    estimates = []
    for r in (radius, 0.5 * radius):
        coeffs = (rotation * taylor_coefficients(phi1, m, r, n_nodes)).real
        estimates.append(coeffs)
    full, half = estimates
    scale = np.maximum(np.abs(full), np.abs(half))
    if np.any(np.abs(full - half) > rtol * scale + 1e-10):
        raise NonConvergence(
            "two-radius coefficient estimates disagree; exponent may not be "
            f"analytic within radius {radius}"
        )
    return ExpansionCoefficients(t=t, sigma0=sigma0, a=full[1:])


# -- JSON plumbing --------------------------------------------------------------

def model_from_json(doc: str | dict) -> CharacteristicModel:
    """Build a model from {"model": name, "params": {...}}."""
    try:
        spec = json.loads(doc) if isinstance(doc, str) else doc
        name = spec["model"]
        params = spec["params"]
        if name == "black-scholes":
            return BlackScholesModel(sigma=float(params["sigma"]))
        if name == "merton":
            return MertonModel(a=float(params["a"]), m=float(params["m"]),
                               s=float(params["s"]), alpha=float(params["alpha"]))
        if name == "variance-gamma":
            return VarianceGammaModel(alpha=float(params["alpha"]),
                                      G=float(params["G"]), M=float(params["M"]))
        if name == "heston":
            return HestonModel(HestonParams(
                kappa=float(params["kappa"]), theta=float(params["theta"]),
                delta=float(params["delta"]), rho=float(params["rho"]),
                y=float(params["y"])))
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise IoFailure(f"malformed model document: {exc}")
    raise IoFailure(f"unknown model name '{name}'")
