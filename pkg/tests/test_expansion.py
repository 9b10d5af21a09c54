"""The smile expansion engine.

Independent oracles used here:
- numpy's physicists' Hermite evaluation for the recursion,
- high-precision numeric sigma-derivatives of the closed-form BS price
  (mpmath) for the derivative ratios,
- a from-scratch hand assembly of the second-order smile for the engine.
"""

import math

import mpmath as mp
import numpy as np
import pytest
from numpy.polynomial import hermite as npherm

from cfsmile import (
    BlackScholesModel,
    ExpansionOrder,
    MertonModel,
    bs_price,
    make_context,
    smile_curve,
    smile_point,
)
from cfsmile.errors import DomainViolation
from cfsmile.expansion import (
    bs_derivative_ratio,
    coefficients_for,
    hermite,
    sigma_correction,
    u_ratio,
)
from cfsmile.models import ExpansionCoefficients


def test_hermite_matches_numpy():
    ys = np.linspace(-3.0, 3.0, 13)
    for k in range(0, 9):
        unit = np.zeros(k + 1)
        unit[k] = 1.0
        for y in ys:
            assert hermite(k, y) == pytest.approx(npherm.hermval(y, unit), rel=1e-12)


def test_vomma_identity_randomized(rng):
    for _ in range(100):
        t = rng.uniform(0.1, 3.0)
        x = rng.uniform(-0.5, 0.5)
        zeta = x + rng.uniform(-1.0, 1.0)
        sigma0 = rng.uniform(0.1, 1.2)
        ctx = make_context(t, x, zeta, sigma0)
        expected = (zeta - x) ** 2 / (t * sigma0 ** 3) - t * sigma0 / 4.0
        assert bs_derivative_ratio(2, ctx) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_derivative_ratios_match_numeric_differentiation(n):
    t, x, zeta, sigma0 = 0.8, 0.1, 0.4, 0.45
    mp.mp.dps = 40

    def price(sigma):
        st = sigma * mp.sqrt(t)
        d1 = (mp.mpf(x) - zeta) / st + st / 2
        return mp.e ** x * mp.ncdf(d1) - mp.e ** zeta * mp.ncdf(d1 - st)

    expected = float(mp.diff(price, sigma0, n) / mp.diff(price, sigma0, 1))
    ctx = make_context(t, x, zeta, sigma0)
    assert bs_derivative_ratio(n, ctx) == pytest.approx(expected, rel=1e-10)


def test_first_order_term_closed_form():
    # for m = 3 the first-order vol term reduces to
    # (1 / t sigma0) [ (a2 + a3) + a3 B H_1(y0) ],  B = -1 / (sigma0 sqrt(2t))
    t, x, zeta, sigma0 = 0.8, 0.1, 0.4, 0.45
    a2, a3 = -0.02, 0.004
    ctx = make_context(t, x, zeta, sigma0)
    coeffs = ExpansionCoefficients(t=t, sigma0=sigma0, a=np.array([a2, a3]))
    b = -1.0 / (sigma0 * math.sqrt(2.0 * t))
    expected = ((a2 + a3) + a3 * b * 2.0 * ctx.y0) / (t * sigma0)
    assert u_ratio(1, 3, coeffs, ctx) == pytest.approx(expected, rel=1e-13)


def hand_second_order_smile(t, x, zeta, sigma0, a2, a3):
    """From-scratch assembly of the (n=2, m=3) smile: first-order Hermite sum,
    second-order self-convolution, and the vomma correction."""
    ctx = make_context(t, x, zeta, sigma0)
    y0 = ctx.y0
    b = -1.0 / (sigma0 * math.sqrt(2.0 * t))

    def h(k):
        unit = np.zeros(k + 1)
        unit[k] = 1.0
        return npherm.hermval(y0, unit)

    base = {2: a2 + a3, 3: a3}
    sigma1 = (base[2] * h(0) + base[3] * b * h(1)) / (t * sigma0)

    conv = {4: base[2] ** 2, 5: 2 * base[2] * base[3], 6: base[3] ** 2}
    u2 = sum(
        c * (b ** (s - 2) * h(s - 2) - b ** (s - 3) * h(s - 3))
        for s, c in conv.items()
    ) / (2.0 * t * sigma0)

    vomma_ratio = (zeta - x) ** 2 / (t * sigma0 ** 3) - t * sigma0 / 4.0
    sigma2 = u2 - 0.5 * sigma1 ** 2 * vomma_ratio
    return sigma0 + sigma1 + sigma2


def test_second_order_smile_matches_hand_assembly(rng):
    order = ExpansionOrder(2, 3)
    for _ in range(100):
        t = rng.uniform(0.1, 3.0)
        x = rng.uniform(-0.5, 0.5)
        zeta = x + rng.uniform(-1.0, 1.0)
        sigma0 = rng.uniform(0.2, 1.0)
        a2 = rng.uniform(-0.1, 0.02)
        a3 = rng.uniform(-0.02, 0.02)
        coeffs = ExpansionCoefficients(t=t, sigma0=sigma0, a=np.array([a2, a3]))
        got = smile_point(coeffs, order, make_context(t, x, zeta, sigma0)).total
        expected = hand_second_order_smile(t, x, zeta, sigma0, a2, a3)
        assert got == pytest.approx(expected, abs=1e-12)


U_RATIO_ORACLE = {  # frozen regression values at (t, x, zeta, sigma0) below
    1: -0.023582628410303307,
    2: -0.00047753872757974825,
    3: 0.00035127661181846577,
}


@pytest.mark.parametrize("n", sorted(U_RATIO_ORACLE))
def test_u_ratio_frozen(n):
    ctx = make_context(0.8, 0.1, 0.4, 0.45)
    coeffs = ExpansionCoefficients(
        t=0.8, sigma0=0.45, a=np.array([-0.02, 0.004, -0.0007]))
    assert u_ratio(n, 4, coeffs, ctx) == pytest.approx(U_RATIO_ORACLE[n], rel=1e-13)


def test_bs_degeneracy():
    # with the anchor equal to the model vol all coefficients vanish and
    # every order returns the anchor exactly
    sigma = 0.35
    model = BlackScholesModel(sigma=sigma)
    for t in (0.25, 1.0, 4.0):
        results = smile_curve(model, ExpansionOrder(3, 8), t, 0.0,
                              np.linspace(-1.0, 1.0, 21), sigma)
        for r in results:
            assert abs(r.total - sigma) < 1e-12


def test_near_money_accuracy_against_oracle():
    # around the money the third-order smile should sit within a fraction of
    # a vol point of the Fourier-oracle implied vol
    from cfsmile import fourier_call_price, implied_vol

    model = MertonModel(a=0.2, m=0.0, s=0.3, alpha=1.0)
    t, x, sigma0 = 1.0, 0.0, 0.45
    order = ExpansionOrder(3, 8)
    coeffs = coefficients_for(model, t, sigma0, 8)
    for zeta in (-0.2, 0.0, 0.2):
        truth = implied_vol(fourier_call_price(model, t, x, zeta), t, x, zeta)
        approx = smile_point(coeffs, order, make_context(t, x, zeta, sigma0)).total
        assert approx == pytest.approx(truth, abs=5e-3)


SMILE_ORACLE = {  # frozen totals at the reference setups, zeta in {-0.5, 0, 0.7}
    "merton": (3, 7, 0.55, [0.48593223406815877, 0.44019440903927692,
                            0.42222969699810231]),
    "vg": (3, 8, 0.55, [0.46430626584329743, 0.45011143255866892,
                        0.47490186959062886]),
    "heston": (3, 6, 0.95, [0.65732827456484322, 0.63552297947370151,
                            0.61102273902766924]),
}


@pytest.mark.parametrize("name", sorted(SMILE_ORACLE))
def test_smile_frozen_values(name, merton_model, vg_model, heston_model):
    model = {"merton": merton_model, "vg": vg_model, "heston": heston_model}[name]
    n, m, sigma0, expected = SMILE_ORACLE[name]
    coeffs = coefficients_for(model, 1.0, sigma0, m)
    for zeta, value in zip((-0.5, 0.0, 0.7), expected):
        got = smile_point(coeffs, ExpansionOrder(n, m),
                          make_context(1.0, 0.0, zeta, sigma0)).total
        assert got == pytest.approx(value, rel=1e-12)


def test_sigma_terms_sum_to_total(merton_model):
    coeffs = coefficients_for(merton_model, 1.0, 0.55, 7)
    point = smile_point(coeffs, ExpansionOrder(3, 7),
                        make_context(1.0, 0.0, 0.2, 0.55))
    assert sum(point.sigma_terms) + 0.55 == pytest.approx(point.total, abs=1e-15)
    assert not point.flagged


def test_flagged_when_total_nonpositive():
    # absurd coefficients push the total negative; the value is kept but flagged
    coeffs = ExpansionCoefficients(t=1.0, sigma0=0.2, a=np.array([-0.5]))
    point = smile_point(coeffs, ExpansionOrder(1, 2),
                        make_context(1.0, 0.0, 0.0, 0.2))
    assert point.total <= 0.0
    assert point.flagged


def test_order_cap_guard():
    coeffs = ExpansionCoefficients(t=1.0, sigma0=0.5, a=np.zeros(19))
    with pytest.raises(DomainViolation):
        smile_point(coeffs, ExpansionOrder(10, 20),
                    make_context(1.0, 0.0, 0.0, 0.5))


def test_sigma_correction_vanishes_at_first_order():
    ctx = make_context(1.0, 0.0, 0.1, 0.4)
    assert sigma_correction(1, 5, [], ctx) == 0.0
