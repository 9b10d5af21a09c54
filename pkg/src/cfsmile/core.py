"""Shared domain types and numeric conventions.

All real scalars are 64-bit floats; log-strike ``zeta`` is the canonical
moneyness coordinate everywhere (strikes K = exp(zeta) appear only at I/O
boundaries).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainViolation


@dataclass(frozen=True)
class SmileContext:
    """A single (maturity, spot, strike, anchor vol) evaluation point.

    ``y0`` is the scaled moneyness (x - zeta - sigma0^2 t / 2) / (sigma0 sqrt(2t))
    at which every Hermite polynomial in the smile formulas is evaluated.
    """

    t: float
    x: float
    zeta: float
    sigma0: float
    y0: float


@dataclass(frozen=True)
class ExpansionOrder:
    """Order pair (n, m): series order n >= 1, coefficient truncation m >= 2."""

    n: int
    m: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainViolation(f"series order n must be >= 1, got {self.n}")
        if self.m < 2:
            raise DomainViolation(f"truncation order m must be >= 2, got {self.m}")


def make_context(t: float, x: float, zeta: float, sigma0: float) -> SmileContext:
    """Build a :class:`SmileContext`, deriving y0 from the inputs.

    Raises
    ------
    DomainViolation
        If t <= 0, sigma0 <= 0, or x / zeta are not finite.
    """
    if not (t > 0.0):
        raise DomainViolation(f"maturity must be positive, got t={t}")
    if not (sigma0 > 0.0):
        raise DomainViolation(f"anchor volatility must be positive, got sigma0={sigma0}")
    if not (math.isfinite(x) and math.isfinite(zeta)):
        raise DomainViolation(f"x and zeta must be finite, got x={x}, zeta={zeta}")
    y0 = (x - zeta - 0.5 * sigma0 * sigma0 * t) / (sigma0 * math.sqrt(2.0 * t))
    return SmileContext(t=float(t), x=float(x), zeta=float(zeta), sigma0=float(sigma0), y0=y0)
