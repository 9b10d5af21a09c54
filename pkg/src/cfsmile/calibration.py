"""Model-free calibration: fit (sigma0, a_2..a_m) per maturity directly to an
observed implied-volatility smile, plus the jump-model consistency diagnostic
on the coefficient term structure."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .core import ExpansionOrder, make_context
from .errors import DomainViolation, FitFailure, IoFailure
from .expansion import smile_point
from .models import ExpansionCoefficients

_SIGMA0_FLOOR = 1e-4


@dataclass(frozen=True)
class QuoteSurface:
    """Observed implied vols: per maturity, strictly increasing log strikes."""

    x: float
    maturities: tuple[float, ...]
    strikes: tuple[np.ndarray, ...]
    vols: tuple[np.ndarray, ...]

    def __post_init__(self):
        ts = np.asarray(self.maturities)
        if len(ts) == 0:
            raise DomainViolation("surface has no maturities")
        if np.any(ts <= 0.0) or np.any(np.diff(ts) <= 0.0):
            raise DomainViolation("maturities must be positive and strictly increasing")
        for t, ks, vs in zip(self.maturities, self.strikes, self.vols):
            if len(ks) != len(vs):
                raise DomainViolation(f"strike/vol length mismatch at t={t}")
            if len(ks) > 1 and np.any(np.diff(ks) <= 0.0):
                raise DomainViolation(f"strikes must be strictly increasing at t={t}")
            if np.any(np.asarray(vs) <= 0.0):
                raise DomainViolation(f"quoted vols must be positive at t={t}")


@dataclass(frozen=True)
class CalibratedSlice:
    """One maturity's fitted (sigma0, a_2..a_m) with fit diagnostics."""

    t: float
    sigma0: float
    a: np.ndarray
    rmse: float
    iterations: int
    residuals: np.ndarray

    @property
    def coefficients(self) -> ExpansionCoefficients:
        return ExpansionCoefficients(t=self.t, sigma0=self.sigma0, a=self.a)

    def to_json_dict(self) -> dict:
        return {
            "t": self.t,
            "sigma0": self.sigma0,
            "a": {f"a{k + 2}": float(v) for k, v in enumerate(self.a)},
            "diagnostics": {
                "rmse": self.rmse,
                "iterations": self.iterations,
                "residuals": [float(r) for r in self.residuals],
            },
        }


@dataclass(frozen=True)
class SliceOutcome:
    """Per-slice result wrapper so one bad slice cannot abort a surface run."""

    t: float
    result: CalibratedSlice | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.result is not None


def _coefficient_scales(m: int) -> np.ndarray:
    # internal optimizer variables are (sigma0, a2, a3*10, a4*100, ...):
    # the fitted coefficients span many orders of magnitude
    return 10.0 ** np.arange(0, m - 1)


def _smile_vols(t: float, x: float, strikes: np.ndarray, sigma0: float,
                a: np.ndarray, order: ExpansionOrder) -> np.ndarray:
    coeffs = ExpansionCoefficients(t=t, sigma0=sigma0, a=a)
    return np.array([
        smile_point(coeffs, order, make_context(t, x, float(k), sigma0)).total
        for k in strikes
    ])


def calibrate_slice(t: float, strikes, vols, order: ExpansionOrder,
                    x: float) -> CalibratedSlice:
    """Least-squares fit of (sigma0, a_2..a_m) to one maturity's quotes.

    Initial guess: sigma0 = largest quoted vol, all coefficients zero.
    Coefficients are unbounded; sigma0 is kept strictly positive.
    """
    strikes = np.asarray(strikes, dtype=float)
    vols = np.asarray(vols, dtype=float)
    if strikes.size == 0:
        raise DomainViolation(f"empty quote slice at t={t}")
    if strikes.size != vols.size:
        raise DomainViolation("strike/vol length mismatch")
    m = order.m
    if strikes.size < m:
        raise FitFailure(
            f"slice at t={t} has {strikes.size} quotes but {m} free parameters")
    scales = _coefficient_scales(m)

    def residuals(theta):
        sigma0 = theta[0]
        a = theta[1:] / scales
        try:
            return _smile_vols(t, x, strikes, sigma0, a, order) - vols
        except DomainViolation:
            return np.full(vols.shape, 1e3)

    theta0 = np.zeros(m)
    theta0[0] = float(np.max(vols))
    lower = np.full(m, -np.inf)
    lower[0] = _SIGMA0_FLOOR
    upper = np.full(m, np.inf)
    res = least_squares(residuals, theta0, bounds=(lower, upper), method="trf",
                        xtol=1e-14, ftol=1e-14, gtol=1e-14, max_nfev=400 * m)
    if not res.success:
        raise FitFailure(f"slice calibration at t={t} did not converge: {res.message}")
    if res.cost > 0.5 * float(np.sum(residuals(theta0) ** 2)) + 1e-30 and res.cost > 1e-12:
        raise FitFailure(f"optimizer returned a point worse than the initial guess at t={t}")
    sigma0 = float(res.x[0])
    a = res.x[1:] / scales
    final = _smile_vols(t, x, strikes, sigma0, a, order) - vols
    rmse = float(np.sqrt(np.mean(final ** 2)))
    return CalibratedSlice(t=t, sigma0=sigma0, a=a, rmse=rmse,
                           iterations=int(res.nfev), residuals=final)


def calibrate_surface(surface: QuoteSurface, order: ExpansionOrder) -> list[SliceOutcome]:
    """Independent per-maturity calibrations; failures are isolated per slice."""
    outcomes = []
    for t, ks, vs in zip(surface.maturities, surface.strikes, surface.vols):
        try:
            outcomes.append(SliceOutcome(t=t, result=calibrate_slice(
                t, ks, vs, order, surface.x)))
        except (DomainViolation, FitFailure) as exc:
            outcomes.append(SliceOutcome(t=t, error=f"{exc.kind}: {exc.detail}"))
    return outcomes


@dataclass(frozen=True)
class LevyConsistencyReport:
    """Dispersion of the per-maturity normalised coefficients.

    For a time-homogeneous jump model, sigma0^2/2 + a_2(t)/t and a_q(t)/t
    (q >= 3) are maturity-independent; large dispersion flags dynamics that
    such a model cannot reproduce.
    """

    dispersion: dict[int, float]
    flagged: dict[int, bool]
    threshold: float

    @property
    def levy_like(self) -> bool:
        return not any(self.flagged.values())


def levy_consistency_report(slices: list[CalibratedSlice],
                            threshold: float = 0.10) -> LevyConsistencyReport:
    """Coefficient-of-variation report across maturities for each q."""
    if len(slices) < 2:
        raise DomainViolation("need at least 2 calibrated slices for a term-structure report")
    m = min(s.a.size + 1 for s in slices)
    dispersion: dict[int, float] = {}
    flagged: dict[int, bool] = {}
    for q in range(2, m + 1):
        if q == 2:
            values = np.array([0.5 * s.sigma0 ** 2 + s.a[0] / s.t for s in slices])
        else:
            values = np.array([s.a[q - 2] / s.t for s in slices])
        mean = np.mean(values)
        cv = float(np.std(values) / abs(mean)) if mean != 0.0 else math.inf
        dispersion[q] = cv
        flagged[q] = cv > threshold
    return LevyConsistencyReport(dispersion=dispersion, flagged=flagged,
                                 threshold=threshold)


# -- I/O ------------------------------------------------------------------------

def load_quotes_csv(path: str, x: float) -> QuoteSurface:
    """Read a quotes CSV with header ``t,log_strike,iv`` into a surface."""
    rows: list[tuple[float, float, float]] = []
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            if reader.fieldnames is None or not {"t", "log_strike", "iv"} <= set(
                    name.strip() for name in reader.fieldnames):
                raise IoFailure(f"quotes CSV must have header t,log_strike,iv, got {reader.fieldnames}")
            for row in reader:
                rows.append((float(row["t"]), float(row["log_strike"]), float(row["iv"])))
    except OSError as exc:
        raise IoFailure(f"cannot read quotes file {path}: {exc}")
    except (ValueError, KeyError) as exc:
        raise IoFailure(f"malformed quotes CSV {path}: {exc}")
    if not rows:
        raise IoFailure(f"quotes CSV {path} has no data rows")
    ts = sorted({r[0] for r in rows})
    strikes, vols = [], []
    for t in ts:
        slice_rows = sorted((r[1], r[2]) for r in rows if r[0] == t)
        strikes.append(np.array([r[0] for r in slice_rows]))
        vols.append(np.array([r[1] for r in slice_rows]))
    return QuoteSurface(x=x, maturities=tuple(ts), strikes=tuple(strikes),
                        vols=tuple(vols))


def outcomes_to_json(outcomes: list[SliceOutcome]) -> str:
    records = []
    for outcome in outcomes:
        if outcome.ok:
            records.append(outcome.result.to_json_dict())
        else:
            records.append({"t": outcome.t, "error": outcome.error})
    return json.dumps(records, indent=2)
