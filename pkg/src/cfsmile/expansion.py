"""The smile engine: Hermite machinery, derivative-ratio identities and the
assembled implied-volatility approximation of order (n, m).

Every building block is a ratio of derivatives of the Black-Scholes price,
reduced to polynomials via the physicists' Hermite polynomials evaluated at
the scaled moneyness y0 of the :class:`~cfsmile.core.SmileContext`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ExpansionOrder, SmileContext, make_context
from .errors import DomainViolation
from .models import (
    CharacteristicModel,
    ExpansionCoefficients,
    MertonModel,
    VarianceGammaModel,
    generic_coefficients,
    levy_coefficients,
)

_MAX_NM = 64


def hermite(n: int, y: float) -> float:
    """Physicists' Hermite polynomial H_n(y) by three-term recursion."""
    if n < 0:
        raise DomainViolation(f"Hermite degree must be >= 0, got {n}")
    return hermite_all(n, y)[n]


def hermite_all(n_max: int, y: float) -> np.ndarray:
    """H_0(y)..H_n_max(y); recursion H_{k+1} = 2y H_k - 2k H_{k-1}."""
    values = np.empty(n_max + 1)
    values[0] = 1.0
    if n_max >= 1:
        values[1] = 2.0 * y
    for k in range(1, n_max):
        values[k + 1] = 2.0 * y * values[k] - 2.0 * k * values[k - 1]
    return values


def c_table(n_max: int) -> list[np.ndarray]:
    """Triangular table of the sigma-to-x derivative conversion coefficients.

    Row n holds [c_{n,n}, c_{n,n-2}, ..., c_{n, n-2*floor(n/2)}]:
    c_{n,n} = 1 and c_{n,n-2q} = (n-2q+1) c_{n-1,n-2q+1} + c_{n-1,n-2q-1},
    with out-of-range entries treated as zero. All entries are positive
    integers.
    """
    if n_max < 1:
        raise DomainViolation(f"table size must be >= 1, got {n_max}")
    rows: list[np.ndarray] = [np.array([])]  # index 0 unused
    rows.append(np.array([1.0]))
    for n in range(2, n_max + 1):
        prev = rows[n - 1]
        row = np.zeros(n // 2 + 1)
        row[0] = 1.0
        for q in range(1, n // 2 + 1):
            left = prev[q - 1] if q - 1 < len(prev) else 0.0
            right = prev[q] if q < len(prev) else 0.0
            row[q] = (n - 2 * q + 1) * left + right
        rows.append(row)
    return rows


def bs_derivative_ratio(n: int, context: SmileContext) -> float:
    """Ratio of the n-th to the first sigma-derivative of the Black-Scholes
    price, as a finite Hermite sum at y0."""
    if n < 1:
        raise DomainViolation(f"derivative order must be >= 1, got {n}")
    t, sigma0, y0 = context.t, context.sigma0, context.y0
    scale = sigma0 * math.sqrt(2.0 * t)
    herm = hermite_all(max(2 * n - 2, 0), y0)  # max index p+n-q-1 at q=0, p=n-1
    table = c_table(n)
    total = 0.0
    for q in range(n // 2 + 1):
        c_nq = table[n][q]
        for p in range(n - q):
            idx = p + n - q - 1
            total += (
                math.comb(n - q - 1, p)
                * c_nq
                * sigma0 ** (n - 2 * q - 1)
                * t ** (n - q - 1)
                * scale ** (1 - p - n + q)
                * herm[idx]
            )
    return total


def derivative_ratio_lemma(m: int, n: int, context: SmileContext) -> float:
    """Hermite form of d_x^m (d_x^n - d_x) u / (d_x^2 - d_x) u for the
    Black-Scholes price: sum over i of (-1/(sigma0 sqrt(2t)))^{m+i-2} H_{m+i-2}(y0)."""
    if m < 0 or n < 2:
        raise DomainViolation(f"need m >= 0 and n >= 2, got m={m}, n={n}")
    base = -1.0 / (context.sigma0 * math.sqrt(2.0 * context.t))
    herm = hermite_all(m + n - 2, context.y0)
    return sum(base ** (m + i - 2) * herm[m + i - 2] for i in range(2, n + 1))


def _power_sum_poly(coeffs: ExpansionCoefficients, n: int) -> np.ndarray:
    """Coefficient array (by power of the derivative symbol) of
    (sum_{j=2}^m a_j sum_{k=2}^j w^k)^n, indices 0..n*m."""
    m = coeffs.m
    base = np.zeros(m + 1)
    # a_j contributes w^k for every 2 <= k <= j, so the power-s weight is
    # the tail sum of the coefficients from s upward
    for s in range(2, m + 1):
        base[s] = float(np.sum(coeffs.a[s - 2:]))
    poly = base
    for _ in range(n - 1):
        poly = np.convolve(poly, base)
    return poly


def u_ratio(n: int, m: int, coeffs: ExpansionCoefficients, context: SmileContext) -> float:
    """The n-th price-perturbation term over vega, u_n^(m) / d_sigma u.

    Evaluates the nested composition sums as a single polynomial power,
    then maps each monomial to a Hermite value through the binomial
    expansion of (d_x^2 - d_x)^{n-1}.
    """
    if n < 1:
        raise DomainViolation(f"order n must be >= 1, got {n}")
    if m != coeffs.m:
        raise DomainViolation(f"coefficients truncated at m={coeffs.m}, requested m={m}")
    if n * m > _MAX_NM:
        raise DomainViolation(f"n*m = {n * m} exceeds the combinatorial cap {_MAX_NM}")
    t, sigma0, y0 = context.t, context.sigma0, context.y0
    base = -1.0 / (sigma0 * math.sqrt(2.0 * t))
    poly = _power_sum_poly(coeffs, n)
    herm = hermite_all(n * m - 2, y0)  # max index s - n - 1 + l <= nm - 2
    total = 0.0
    for s in range(2 * n, n * m + 1):
        weight = poly[s]
        if weight == 0.0:
            continue
        inner = 0.0
        for l in range(n):
            idx = s - n - 1 + l
            inner += math.comb(n - 1, l) * (-1.0) ** (n - 1 - l) * base ** idx * herm[idx]
        total += weight * inner
    return total / (math.factorial(n) * t * sigma0)


def sigma_correction(k: int, m: int, lower_sigmas: list[float],
                     context: SmileContext) -> float:
    """Feedback term removing products of lower-order vol corrections.

    ``lower_sigmas`` holds the vol terms of orders 1..k-1; the sum over
    compositions of k into n >= 2 parts is evaluated by polynomial powers.
    """
    if k < 1:
        raise DomainViolation(f"order k must be >= 1, got {k}")
    if len(lower_sigmas) < k - 1:
        raise DomainViolation(
            f"need {k - 1} lower-order terms, got {len(lower_sigmas)}"
        )
    if k == 1:
        return 0.0
    base = np.zeros(k)
    base[1:k] = lower_sigmas[: k - 1]
    poly = base
    total = 0.0
    for n in range(2, k + 1):
        poly = np.convolve(poly, base)[: k + 1]
        total += poly[k] / math.factorial(n) * bs_derivative_ratio(n, context)
    return total


@dataclass(frozen=True)
class SmileApproximation:
    """One evaluated smile point: per-order vol terms and their total.

    ``flagged`` marks non-positive totals, the operational signal that the
    point lies outside the expansion's accuracy region (the value is kept,
    never clamped).
    """

    context: SmileContext
    order: ExpansionOrder
    sigma_terms: tuple[float, ...]
    total: float

    @property
    def flagged(self) -> bool:
        return self.total <= 0.0


def coefficients_for(model: CharacteristicModel, t: float, sigma0: float,
                     m: int) -> ExpansionCoefficients:
    """Model coefficients a_2..a_m: closed form for the jump models, contour
    extraction otherwise."""
    if isinstance(model, (MertonModel, VarianceGammaModel)):
        return levy_coefficients(model, t, sigma0, m)
    return generic_coefficients(model, t, sigma0, m)


def smile_point(model_or_coeffs, order: ExpansionOrder,
                context: SmileContext) -> SmileApproximation:
    """Assembled implied-vol approximation sigma0 + sum of order-k terms."""
    if isinstance(model_or_coeffs, ExpansionCoefficients):
        coeffs = model_or_coeffs
    else:
        coeffs = coefficients_for(model_or_coeffs, context.t, context.sigma0, order.m)
    terms: list[float] = []
    for k in range(1, order.n + 1):
        term = u_ratio(k, order.m, coeffs, context) - sigma_correction(
            k, order.m, terms, context
        )
        terms.append(term)
    return SmileApproximation(
        context=context,
        order=order,
        sigma_terms=tuple(terms),
        total=context.sigma0 + sum(terms),
    )


def smile_curve(model: CharacteristicModel, order: ExpansionOrder, t: float,
                x: float, zeta_grid, sigma0: float) -> list[SmileApproximation]:
    """Map :func:`smile_point` over a strike grid, extracting the model
    coefficients once per (t, sigma0)."""
    zetas = np.asarray(zeta_grid, dtype=float)
    if zetas.size == 0:
        raise DomainViolation("empty strike grid")
    coeffs = coefficients_for(model, t, sigma0, order.m)
    return [smile_point(coeffs, order, make_context(t, x, z, sigma0)) for z in zetas]
