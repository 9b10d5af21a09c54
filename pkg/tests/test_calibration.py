"""Model-free calibration: slice round trips, the term-structure consistency
report, and quotes-file I/O."""

import numpy as np
import pytest

from cfsmile import (
    ExpansionOrder,
    QuoteSurface,
    calibrate_slice,
    calibrate_surface,
    levy_consistency_report,
    load_quotes_csv,
    make_context,
    outcomes_to_json,
    smile_point,
)
from cfsmile.calibration import CalibratedSlice
from cfsmile.errors import DomainViolation, IoFailure
from cfsmile.models import ExpansionCoefficients


def synthetic_slice(t, x, sigma0, a, zetas, order):
    coeffs = ExpansionCoefficients(t=t, sigma0=sigma0, a=np.asarray(a))
    return np.array([
        smile_point(coeffs, order, make_context(t, x, z, sigma0)).total
        for z in zetas
    ])


def test_slice_round_trip_recovers_coefficients():
    t, x, sigma0 = 1.0, 0.0, 0.5
    a_true = np.array([-0.04, -0.011, 0.0023])
    order = ExpansionOrder(2, 4)
    zetas = np.linspace(-0.8, 0.8, 17)
    vols = synthetic_slice(t, x, sigma0, a_true, zetas, order)
    fit = calibrate_slice(t, zetas, vols, order, x)
    assert fit.rmse < 1e-10
    assert fit.sigma0 == pytest.approx(sigma0, abs=1e-7)
    assert np.allclose(fit.a, a_true, atol=1e-6)


def test_calibrated_smile_reprices_quotes():
    t, x, sigma0 = 0.5, 0.1, 0.4
    a_true = np.array([-0.02, -0.004])
    order = ExpansionOrder(2, 3)
    zetas = x + np.linspace(-0.5, 0.5, 15)
    vols = synthetic_slice(t, x, sigma0, a_true, zetas, order)
    fit = calibrate_slice(t, zetas, vols, order, x)
    refit = synthetic_slice(t, x, fit.sigma0, fit.a, zetas, order)
    assert np.allclose(refit, vols, atol=1e-9)


def test_surface_isolates_bad_slice():
    t_good, x = 1.0, 0.0
    order = ExpansionOrder(2, 4)
    zetas = np.linspace(-0.5, 0.5, 11)
    vols = synthetic_slice(t_good, x, 0.5, [-0.04, -0.01, 0.002], zetas, order)
    surface = QuoteSurface(
        x=x,
        maturities=(0.5, t_good),
        strikes=(np.array([0.0]), zetas),  # single-point slice is hopeless
        vols=(np.array([1e-8]), vols),
    )
    outcomes = calibrate_surface(surface, order)
    assert len(outcomes) == 2
    assert not outcomes[0].ok and "FitFailure" in outcomes[0].error
    assert outcomes[1].ok
    assert outcomes[1].result.rmse < 1e-8


def test_surface_validation():
    with pytest.raises(DomainViolation):
        QuoteSurface(x=0.0, maturities=(), strikes=(), vols=())
    with pytest.raises(DomainViolation):
        QuoteSurface(x=0.0, maturities=(1.0,),
                     strikes=(np.array([0.1, 0.0]),),  # not increasing
                     vols=(np.array([0.2, 0.2]),))
    with pytest.raises(DomainViolation):
        QuoteSurface(x=0.0, maturities=(1.0,),
                     strikes=(np.array([0.0, 0.1]),),
                     vols=(np.array([0.2, -0.2]),))


def make_slice(t, sigma0, a):
    a = np.asarray(a, dtype=float)
    return CalibratedSlice(t=t, sigma0=sigma0, a=a, rmse=0.0, iterations=1,
                           residuals=np.zeros(1))


def test_consistency_report_flat_term_structure():
    # a_q(t) proportional to t and matching sigma0: zero dispersion
    base = np.array([-0.01, 0.002, -0.0004])
    slices = [make_slice(t, 0.5, base * t) for t in (0.5, 1.0, 2.0)]
    report = levy_consistency_report(slices)
    assert report.levy_like
    assert all(v < 1e-12 for v in report.dispersion.values())


def test_consistency_report_flags_dispersion():
    slices = [
        make_slice(0.5, 0.5, np.array([-0.01, 0.002]) * 0.5),
        make_slice(1.0, 0.5, np.array([-0.02, 0.004]) * 1.0),  # doubled rates
    ]
    report = levy_consistency_report(slices)
    assert not report.levy_like


def test_consistency_report_needs_two_slices():
    with pytest.raises(DomainViolation):
        levy_consistency_report([make_slice(1.0, 0.5, [-0.01])])


def test_quotes_csv_round_trip(tmp_path):
    path = tmp_path / "quotes.csv"
    path.write_text(
        "t,log_strike,iv\n"
        "0.5,-0.2,0.25\n0.5,0.0,0.22\n0.5,0.2,0.21\n"
        "1.0,-0.2,0.26\n1.0,0.0,0.23\n1.0,0.2,0.22\n"
    )
    surface = load_quotes_csv(str(path), x=0.0)
    assert surface.maturities == (0.5, 1.0)
    assert np.allclose(surface.strikes[0], [-0.2, 0.0, 0.2])
    assert np.allclose(surface.vols[1], [0.26, 0.23, 0.22])


def test_quotes_csv_rejects_bad_inputs(tmp_path):
    missing = tmp_path / "missing.csv"
    with pytest.raises(IoFailure):
        load_quotes_csv(str(missing), x=0.0)
    bad_header = tmp_path / "bad_header.csv"
    bad_header.write_text("maturity,strike,vol\n1.0,0.0,0.2\n")
    with pytest.raises(IoFailure):
        load_quotes_csv(str(bad_header), x=0.0)
    bad_value = tmp_path / "bad_value.csv"
    bad_value.write_text("t,log_strike,iv\n1.0,zero,0.2\n")
    with pytest.raises(IoFailure):
        load_quotes_csv(str(bad_value), x=0.0)
    empty = tmp_path / "empty.csv"
    empty.write_text("t,log_strike,iv\n")
    with pytest.raises(IoFailure):
        load_quotes_csv(str(empty), x=0.0)


def test_outcomes_json_shape():
    import json

    slices = [make_slice(1.0, 0.5, [-0.01, 0.002])]
    from cfsmile.calibration import SliceOutcome

    outcomes = [SliceOutcome(t=1.0, result=slices[0]),
                SliceOutcome(t=2.0, error="FitFailure: no convergence")]
    doc = json.loads(outcomes_to_json(outcomes))
    assert doc[0]["sigma0"] == pytest.approx(0.5)
    assert doc[0]["a"]["a2"] == pytest.approx(-0.01)
    assert doc[1]["error"].startswith("FitFailure")
