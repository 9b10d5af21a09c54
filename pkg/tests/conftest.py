"""Shared fixtures: the three reference model setups used across the suite."""

import numpy as np
import pytest

from cfsmile import (
    HestonModel,
    HestonParams,
    MertonModel,
    VarianceGammaModel,
)

# Reference parameter sets used consistently throughout the test suite.
MERTON = dict(a=0.25, m=-0.15, s=0.3, alpha=1.5)
VG = dict(M=7.0, G=6.0, alpha=4.5)
HESTON = dict(kappa=1.0, theta=0.3, delta=0.7, rho=-0.3, y=0.5)

MERTON_SIGMA0 = 0.55
VG_SIGMA0 = 0.55
HESTON_SIGMA0 = 0.95


@pytest.fixture
def merton_model():
    return MertonModel(**MERTON)


@pytest.fixture
def vg_model():
    return VarianceGammaModel(**VG)


@pytest.fixture
def heston_model():
    return HestonModel(HestonParams(**HESTON))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
