"""SVI total-variance parameterisation: evaluation, least-squares fitting,
risk-neutral density extraction and the butterfly-arbitrage check."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import least_squares

from .blackscholes import bs_price
from .errors import DomainViolation, FitFailure

_FD_STEP = 1e-4
_DENSITY_FLOOR = -1e-10


@dataclass(frozen=True)
class SVIParams:
    """Five-parameter total-variance smile: level a, slope b, skew rho,
    shift m, smoothing xi."""

    a: float
    b: float
    rho: float
    m: float
    xi: float

    def __post_init__(self):
        if self.b < 0.0 or self.xi <= 0.0 or abs(self.rho) > 1.0:
            raise DomainViolation(f"invalid SVI parameters {self!r}")

    def total_variance(self, k):
        """w(k) = a + b (rho (k - m) + sqrt((k - m)^2 + xi^2)), k = zeta - x."""
        k = np.asarray(k, dtype=float)
        d = k - self.m
        return self.a + self.b * (self.rho * d + np.sqrt(d * d + self.xi * self.xi))

    def to_json_dict(self, t: float) -> dict:
        return {"a": self.a, "b": self.b, "rho": self.rho, "m": self.m,
                "xi": self.xi, "t": t}


@dataclass(frozen=True)
class FitDiagnostics:
    rmse: float
    iterations: int


@dataclass(frozen=True)
class DensityCurve:
    """Strike-space risk-neutral density sampled on a log-strike grid."""

    zetas: np.ndarray
    values: np.ndarray  # density in strike K, evaluated at K = exp(zeta)

    def integral(self) -> float:
        """Integral of the density over the window, in strike space."""
        strikes = np.exp(self.zetas)
        return float(np.trapezoid(self.values * strikes, self.zetas))

    def min_value(self) -> tuple[float, float]:
        i = int(np.argmin(self.values))
        return float(self.values[i]), float(self.zetas[i])


def svi_vol(params: SVIParams, t: float, x: float, zeta) -> np.ndarray | float:
    """Implied vol sqrt(w(zeta - x) / t); raises if total variance is negative."""
    if not (t > 0.0):
        raise DomainViolation(f"maturity must be positive, got t={t}")
    w = params.total_variance(np.asarray(zeta, dtype=float) - x)
    if np.any(w < 0.0):
        raise DomainViolation("negative SVI total variance on the requested strikes")
    out = np.sqrt(w / t)
    return float(out) if out.ndim == 0 else out


def _multistart_points(k: np.ndarray, w: np.ndarray, allow_negative_a: bool):
    w_min, w_max = float(np.min(w)), float(np.max(w))
    span = max(float(np.ptp(k)), 0.1)
    slope = max((w_max - w_min) / span, 1e-3)
    starts = []
    for rho0 in (-0.5, 0.0, 0.5):
        for m0 in (float(k[np.argmin(w)]), 0.0):
            starts.append([max(w_min, 1e-8), slope, rho0, m0, 0.5 * span])
            starts.append([0.5 * (w_min + w_max), 0.5 * slope, rho0, m0, 0.1 * span])
    return starts[:8]


def svi_fit(points: Sequence[tuple[float, float]], t: float, x: float,
            weights: Sequence[float] | None = None,
            allow_negative_a: bool = False) -> tuple[SVIParams, FitDiagnostics]:
    """Weighted least-squares SVI fit in vol units with bound constraints and
    an 8-point multistart (the objective is multi-modal).

    ``allow_negative_a`` relaxes the a >= 0 bound; total variance positivity
    over the fitted strikes is still checked.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 5:
        raise FitFailure(f"need at least 5 (zeta, vol) points, got {pts.shape}")
    k = pts[:, 0] - x
    vols = pts[:, 1]
    w_target = vols * vols * t
    wgt = np.ones_like(vols) if weights is None else np.sqrt(np.asarray(weights, float))

    def residuals(theta):
        a, b, rho, m, xi = theta
        d = k - m
        w = a + b * (rho * d + np.sqrt(d * d + xi * xi))
        return wgt * (np.sqrt(np.maximum(w, 0.0) / t) - vols)

    a_lo = -np.inf if allow_negative_a else 0.0
    span = max(float(np.ptp(k)), 0.1)
    lower = [a_lo, 0.0, -1.0, float(np.min(k)) - span, 1e-8]
    upper = [4.0 * float(np.max(w_target)) + 1.0, 1e3, 1.0, float(np.max(k)) + span, 10.0]

    best = None
    total_nfev = 0
    for start in _multistart_points(k, w_target, allow_negative_a):
        theta0 = np.clip(start, lower, upper)
        try:
            res = least_squares(residuals, theta0, bounds=(lower, upper),
                                method="trf", xtol=1e-14, ftol=1e-14, gtol=1e-14)
        except ValueError:
            continue
        total_nfev += res.nfev
        if res.success and (best is None or res.cost < best.cost):
            best = res
    if best is None:
        raise FitFailure("all SVI multistarts failed to converge")
    a, b, rho, m, xi = best.x
    params = SVIParams(a=float(a), b=float(b), rho=float(min(max(rho, -1.0), 1.0)),
                       m=float(m), xi=float(max(xi, 1e-8)))
    w_fit = params.total_variance(k)
    if np.any(w_fit < 0.0):
        raise FitFailure("fitted SVI has negative total variance on the data window")
    rmse = float(np.sqrt(np.mean((np.sqrt(w_fit / t) - vols) ** 2)))
    return params, FitDiagnostics(rmse=rmse, iterations=total_nfev)


def _density_g(params: SVIParams, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # curvature factor of the density; closed-form w, w', w''
    d = k - params.m
    root = np.sqrt(d * d + params.xi * params.xi)
    w = params.a + params.b * (params.rho * d + root)
    w1 = params.b * (params.rho + d / root)
    w2 = params.b * params.xi * params.xi / root ** 3
    g = (1.0 - k * w1 / (2.0 * w)) ** 2 - 0.25 * w1 * w1 * (1.0 / w + 0.25) + 0.5 * w2
    return g, w


def svi_density(params: SVIParams, t: float, x: float, zeta_grid) -> DensityCurve:
    """Analytic risk-neutral density (in strike) of an SVI smile via the
    chain rule on the Black-Scholes second strike derivative."""
    zetas = np.asarray(zeta_grid, dtype=float)
    k = zetas - x
    g, w = _density_g(params, k)
    sqrt_w = np.sqrt(w)
    d_minus = -k / sqrt_w - 0.5 * sqrt_w
    pdf = np.exp(-0.5 * d_minus * d_minus) / math.sqrt(2.0 * math.pi)
    # g * pdf / sqrt(w) is the log-price density at zeta; divide by the
    # strike to land in strike space
    values = g * pdf / (sqrt_w * np.exp(zetas))
    return DensityCurve(zetas=zetas, values=values)


def bl_density(smile: Callable[[float], float] | SVIParams, t: float, x: float,
               zeta_grid) -> DensityCurve:
    """Risk-neutral density as the second strike derivative of the call price
    with strike-dependent vol.

    SVI smiles use the closed-form chain rule; generic callables use central
    finite differences in zeta (step 1e-4), converted to strike derivatives.
    """
    zetas = np.asarray(zeta_grid, dtype=float)
    if isinstance(smile, SVIParams):
        return svi_density(smile, t, x, zetas)
    h = _FD_STEP
    values = np.empty_like(zetas)
    for i, z in enumerate(zetas):
        c_minus = bs_price(t, x, z - h, smile(z - h))
        c_mid = bs_price(t, x, z, smile(z))
        c_plus = bs_price(t, x, z + h, smile(z + h))
        d1 = (c_plus - c_minus) / (2.0 * h)
        d2 = (c_plus - 2.0 * c_mid + c_minus) / (h * h)
        # K dC/dK = dC/dzeta, so d2C/dK2 = (d2/dzeta2 - d/dzeta) C / K^2
        values[i] = (d2 - d1) / math.exp(2.0 * z)
    return DensityCurve(zetas=zetas, values=values)


@dataclass(frozen=True)
class ButterflyReport:
    arbitrage_free: bool
    min_density: float
    argmin: float


def butterfly_check(params: SVIParams, t: float, x: float,
                    window: tuple[float, float], n_points: int = 801) -> ButterflyReport:
    """Dense-grid density positivity over ``window`` (in zeta)."""
    zetas = np.linspace(window[0], window[1], n_points)
    curve = bl_density(params, t, x, zetas)
    min_value, argmin = curve.min_value()
    return ButterflyReport(
        arbitrage_free=bool(min_value >= _DENSITY_FLOOR),
        min_density=min_value,
        argmin=argmin,
    )
