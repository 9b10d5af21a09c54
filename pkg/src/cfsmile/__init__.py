"""Implied-volatility smile approximations from characteristic functions.

Closed-form smile approximations of order (n, m) for any model whose
characteristic exponent is known, a Fourier-quadrature pricing oracle,
SVI smoothing with butterfly checks, and model-free smile calibration.
"""

from .blackscholes import bs_price, bs_vega, implied_vol, lagrange_iv_series
from .calibration import (
    CalibratedSlice,
    LevyConsistencyReport,
    QuoteSurface,
    SliceOutcome,
    calibrate_slice,
    calibrate_surface,
    levy_consistency_report,
    load_quotes_csv,
    outcomes_to_json,
)
from .core import ExpansionOrder, SmileContext, make_context
from .errors import (
    ContourViolation,
    DomainViolation,
    FitFailure,
    IoFailure,
    MartingaleViolation,
    NonConvergence,
    NumericsError,
)
from .expansion import (
    SmileApproximation,
    bs_derivative_ratio,
    c_table,
    derivative_ratio_lemma,
    hermite,
    sigma_correction,
    smile_curve,
    smile_point,
    u_ratio,
)
from .fourier import ContourSpec, fourier_call_price, payoff_transform
from .models import (
    BlackScholesModel,
    CharacteristicModel,
    ExpansionCoefficients,
    HestonModel,
    HestonParams,
    MertonModel,
    VarianceGammaModel,
    generic_coefficients,
    heston_a2,
    levy_coefficients,
    levy_moments,
    model_from_json,
    phi_bs,
    phi_heston,
    phi_merton,
    phi_vg,
)
from .svi import (
    ButterflyReport,
    DensityCurve,
    FitDiagnostics,
    SVIParams,
    bl_density,
    butterfly_check,
    svi_density,
    svi_fit,
    svi_vol,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
