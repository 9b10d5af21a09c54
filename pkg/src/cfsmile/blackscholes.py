"""Black-Scholes pricing, vega identities and implied-volatility inversion.

Zero rates and dividends throughout: the underlying is a positive
martingale exp(X) and the call price is E[(exp(X_t) - exp(zeta))^+].
"""

from __future__ import annotations

import math

from .errors import DomainViolation, NonConvergence

_SQRT2 = math.sqrt(2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)

_IV_BRACKET = (1e-8, 10.0)
_IV_MAX_ITER = 100


def _norm_cdf(v: float) -> float:
    # erfc-based, relative error at double-precision level
    return 0.5 * math.erfc(-v / _SQRT2)


def _d_plus_minus(t: float, x: float, zeta: float, sigma: float) -> tuple[float, float]:
    srt = sigma * math.sqrt(t)
    half_var = 0.5 * sigma * sigma * t
    return (x - zeta + half_var) / srt, (x - zeta - half_var) / srt


def bs_price(t: float, x: float, zeta: float, sigma: float) -> float:
    """Call price exp(x) N(d+) - exp(zeta) N(d-)."""
    if not (t > 0.0):
        raise DomainViolation(f"maturity must be positive, got t={t}")
    if not (sigma > 0.0):
        raise DomainViolation(f"volatility must be positive, got sigma={sigma}")
    d_plus, d_minus = _d_plus_minus(t, x, zeta, sigma)
    return math.exp(x) * _norm_cdf(d_plus) - math.exp(zeta) * _norm_cdf(d_minus)


def bs_vega(t: float, x: float, zeta: float, sigma: float) -> float:
    """d(price)/d(sigma) = sqrt(t / 2 pi) exp(x - d+^2 / 2).

    Equals t sigma (d^2/dx^2 - d/dx) applied to the price, the delta-gamma-vega
    lever used throughout the smile expansion.
    """
    if not (t > 0.0):
        raise DomainViolation(f"maturity must be positive, got t={t}")
    if not (sigma > 0.0):
        raise DomainViolation(f"volatility must be positive, got sigma={sigma}")
    d_plus, _ = _d_plus_minus(t, x, zeta, sigma)
    return math.sqrt(t) / _SQRT_2PI * math.exp(x - 0.5 * d_plus * d_plus)


def implied_vol(price: float, t: float, x: float, zeta: float) -> float:
    """Invert the Black-Scholes formula by bisection-safeguarded Newton.

    The target volatility is the unique root in the bracket
    [1e-8, 10]; convergence tolerance is 1e-12 * exp(x) on the price.

    Raises
    ------
    DomainViolation
        If the price violates the arbitrage bounds intrinsic < price < exp(x).
    NonConvergence
        If the iteration cap (100) is hit.
    """
    if not (t > 0.0):
        raise DomainViolation(f"maturity must be positive, got t={t}")
    spot = math.exp(x)
    intrinsic = max(spot - math.exp(zeta), 0.0)
    if not (intrinsic < price < spot):
        raise DomainViolation(
            f"price {price} outside arbitrage bounds ({intrinsic}, {spot})"
        )
    tol = 1e-12 * spot
    lo, hi = _IV_BRACKET
    f_lo = bs_price(t, x, zeta, lo) - price
    f_hi = bs_price(t, x, zeta, hi) - price
    if f_lo > 0.0 or f_hi < 0.0:
        raise NonConvergence(f"implied vol outside bracket {_IV_BRACKET}")
    sigma = 0.5 * (lo + hi)
    for _ in range(_IV_MAX_ITER):
        diff = bs_price(t, x, zeta, sigma) - price
        if abs(diff) < tol:
            return sigma
        if diff > 0.0:
            hi = sigma
        else:
            lo = sigma
        vega = bs_vega(t, x, zeta, sigma)
        candidate = sigma - diff / vega if vega > 0.0 else math.nan
        sigma = candidate if lo < candidate < hi else 0.5 * (lo + hi)
    raise NonConvergence(f"implied vol did not converge in {_IV_MAX_ITER} iterations")


def _inverse_ratio_power(t: float, x: float, zeta: float, sigma0: float,
                         sigma: float, n: int) -> float:
    # ((sigma - sigma0) / (price(sigma) - price(sigma0)))^n with the
    # removable singularity at sigma = sigma0 filled by 1/vega.
    if sigma == sigma0:
        return bs_vega(t, x, zeta, sigma0) ** (-n)
    du = bs_price(t, x, zeta, sigma) - bs_price(t, x, zeta, sigma0)
    return ((sigma - sigma0) / du) ** n


def lagrange_iv_series(u: float, t: float, x: float, zeta: float,
                       sigma0: float, order: int) -> float:
    """Implied vol by series inversion of the price around sigma0.

    Diagnostic-grade only: coefficients beyond first order are computed by
    finite differences (step 1e-4) of the inversion-limit expression, and no
    convergence radius is tracked. ``order`` is capped at 3.

    Raises
    ------
    NonConvergence
        If successive series terms grow in magnitude.
    """
    if not (1 <= order <= 3):
        raise DomainViolation(f"order must be in [1, 3], got {order}")
    if not (sigma0 > 0.0):
        raise DomainViolation(f"anchor volatility must be positive, got {sigma0}")
    du = u - bs_price(t, x, zeta, sigma0)
    h = 1e-4
    terms = []
    for n in range(1, order + 1):
        if n == 1:
            b_n = 1.0 / bs_vega(t, x, zeta, sigma0)
        elif n == 2:
            # first derivative of the squared ratio, central difference
            b_n = (
                _inverse_ratio_power(t, x, zeta, sigma0, sigma0 + h, 2)
                - _inverse_ratio_power(t, x, zeta, sigma0, sigma0 - h, 2)
            ) / (2.0 * h)
        else:
            # second derivative of the cubed ratio
            b_n = (
                _inverse_ratio_power(t, x, zeta, sigma0, sigma0 + h, 3)
                - 2.0 * _inverse_ratio_power(t, x, zeta, sigma0, sigma0, 3)
                + _inverse_ratio_power(t, x, zeta, sigma0, sigma0 - h, 3)
            ) / (h * h)
        terms.append(b_n / math.factorial(n) * du ** n)
    for prev, cur in zip(terms, terms[1:]):
        if abs(cur) > abs(prev) > 0.0:
            raise NonConvergence("series terms grow; price bump too large for inversion")
    return sigma0 + sum(terms)
