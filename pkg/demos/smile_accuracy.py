"""Smile approximations versus the Fourier pricing oracle.

For each bundled model this script evaluates the explicit smile
approximation at increasing series order and compares it with the implied
vol backed out of the Fourier call price, across a grid of log strikes.
"""

import numpy as np

from cfsmile import (
    ExpansionOrder,
    HestonModel,
    HestonParams,
    MertonModel,
    VarianceGammaModel,
    fourier_call_price,
    implied_vol,
    make_context,
    smile_point,
)
from cfsmile.expansion import coefficients_for

SETUPS = [
    ("Merton jump diffusion", MertonModel(a=0.25, m=-0.15, s=0.3, alpha=1.5),
     0.55, 7),
    ("Variance Gamma", VarianceGammaModel(M=7.0, G=6.0, alpha=4.5), 0.55, 8),
    ("Heston", HestonModel(HestonParams(kappa=1.0, theta=0.3, delta=0.7,
                                        rho=-0.3, y=0.5)), 0.95, 6),
]

T, X = 1.0, 0.0

for name, model, sigma0, m in SETUPS:
    print(f"\n{name}  (anchor sigma0 = {sigma0}, coefficient order m = {m})")
    print(f"{'zeta':>6} {'oracle iv':>10} " +
          " ".join(f"{f'order {n}':>10}" for n in (1, 2, 3)) +
          f" {'abs err (3)':>12}")
    coeffs = coefficients_for(model, T, sigma0, m)
    for zeta in np.linspace(-0.8, 0.8, 9):
        truth = implied_vol(fourier_call_price(model, T, X, float(zeta)),
                            T, X, float(zeta))
        totals = []
        for n in (1, 2, 3):
            point = smile_point(coeffs, ExpansionOrder(n, m),
                                make_context(T, X, float(zeta), sigma0))
            totals.append(point.total)
        errs = abs(totals[2] - truth)
        print(f"{zeta:>6.2f} {truth:>10.5f} " +
              " ".join(f"{v:>10.5f}" for v in totals) + f" {errs:>12.2e}")

print("\nEach extra series order cuts the error; over the central strike")
print("range the third-order smile tracks the oracle to a few tenths of a")
print("vol point for the jump models and about a vol point for Heston,")
print("whose large vol-of-vol makes the perturbation stiffer.")
