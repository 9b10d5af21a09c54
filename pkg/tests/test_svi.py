"""SVI fitting, the analytic risk-neutral density, and the butterfly check."""

import math

import numpy as np
import pytest
from scipy.stats import norm

from cfsmile import (
    SVIParams,
    bl_density,
    bs_price,
    butterfly_check,
    svi_density,
    svi_fit,
    svi_vol,
)
from cfsmile.errors import DomainViolation, FitFailure

GOOD = SVIParams(a=0.04, b=0.4, rho=-0.4, m=0.05, xi=0.3)


def test_total_variance_shape():
    k = np.array([-0.5, 0.0, 0.5])
    w = GOOD.total_variance(k)
    expected = 0.04 + 0.4 * (-0.4 * (k - 0.05) + np.sqrt((k - 0.05) ** 2 + 0.09))
    assert np.allclose(w, expected, atol=1e-15)


def test_vol_is_sqrt_of_variance_rate():
    t, x = 2.0, 0.1
    zeta = 0.4
    w = GOOD.total_variance(np.array([zeta - x]))[0]
    assert svi_vol(GOOD, t, x, zeta) == pytest.approx(math.sqrt(w / t), rel=1e-14)


def test_fit_recovers_exact_svi_data():
    t, x = 1.0, 0.0
    zetas = np.linspace(-0.8, 0.8, 25)
    vols = svi_vol(GOOD, t, x, zetas)
    params, diag = svi_fit(list(zip(zetas, vols)), t, x)
    assert diag.rmse < 1e-10
    check = np.array([0.3, -0.55])
    assert np.allclose(svi_vol(params, t, x, check), svi_vol(GOOD, t, x, check),
                       atol=1e-8)


def test_fit_requires_enough_points():
    t, x = 1.0, 0.0
    pts = [(z, 0.2) for z in (-0.1, 0.0, 0.1, 0.2)]
    with pytest.raises(FitFailure):
        svi_fit(pts, t, x)


def test_parameter_validation():
    with pytest.raises(DomainViolation):
        SVIParams(a=0.04, b=-0.1, rho=0.0, m=0.0, xi=0.3)
    with pytest.raises(DomainViolation):
        SVIParams(a=0.04, b=0.4, rho=1.5, m=0.0, xi=0.3)
    with pytest.raises(DomainViolation):
        SVIParams(a=0.04, b=0.4, rho=0.0, m=0.0, xi=-0.2)


def test_analytic_density_matches_finite_difference_of_prices():
    # oracle: direct second strike-difference of BS prices with the SVI vol
    t, x = 1.0, 0.0
    zetas = np.linspace(-0.6, 0.6, 13)
    curve = svi_density(GOOD, t, x, zetas)

    def call(strike_k):
        zeta = math.log(strike_k)
        return bs_price(t, x, zeta, svi_vol(GOOD, t, x, zeta))

    for zeta, got in zip(zetas, curve.values):
        strike = math.exp(zeta)
        h = 1e-4 * strike
        fd = (call(strike + h) - 2 * call(strike) + call(strike - h)) / h ** 2
        assert got == pytest.approx(fd, rel=1e-5)


def test_generic_density_agrees_with_analytic():
    t, x = 1.0, 0.0
    zetas = np.linspace(-0.5, 0.5, 11)
    analytic = bl_density(GOOD, t, x, zetas)
    generic = bl_density(lambda z: svi_vol(GOOD, t, x, z), t, x, zetas)
    assert np.allclose(analytic.values, generic.values, rtol=1e-5, atol=1e-9)


def test_density_integrates_to_one():
    t, x = 1.0, 0.0
    zetas = np.linspace(-20.0, 12.0, 8001)
    curve = svi_density(GOOD, t, x, zetas)
    assert curve.integral() == pytest.approx(1.0, abs=1e-4)


def test_flat_svi_is_lognormal_density():
    # b = 0 gives a flat smile: the density must be the exact lognormal one
    t, x, sigma = 1.0, 0.0, 0.3
    flat = SVIParams(a=sigma * sigma * t, b=0.0, rho=0.0, m=0.0, xi=0.1)
    zetas = np.linspace(-1.0, 1.0, 21)
    curve = svi_density(flat, t, x, zetas)
    st = sigma * math.sqrt(t)
    for zeta, got in zip(zetas, curve.values):
        # lognormal density in strike
        expected = norm.pdf((zeta - x + 0.5 * st * st) / st) / (st * math.exp(zeta))
        assert got == pytest.approx(expected, rel=1e-10)


def test_butterfly_check_flags_negative_density():
    # an extreme skew at low variance produces negative density in the wing
    bad = SVIParams(a=0.005, b=0.6, rho=-0.99, m=0.0, xi=0.01)
    report = butterfly_check(bad, 1.0, 0.0, (-1.0, 1.0))
    assert not report.arbitrage_free
    assert report.min_density < 0.0


def test_butterfly_check_passes_good_surface():
    report = butterfly_check(GOOD, 1.0, 0.0, (-1.0, 1.0))
    assert report.arbitrage_free
    assert report.min_density >= 0.0


def test_json_dict_round_trip():
    doc = GOOD.to_json_dict(t=1.0)
    assert doc["a"] == pytest.approx(0.04)
    assert set(doc) >= {"a", "b", "rho", "m", "xi"}
