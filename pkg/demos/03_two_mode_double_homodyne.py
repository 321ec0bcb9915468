"""
Two-mode squeezing: the Holevo bound is attained by double homodyne
===================================================================

A balanced beam splitter turns the displaced two-mode squeezed vacuum into two
single-mode states squeezed along orthogonal axes. Measuring p on one mode and
q on the other reaches the numerically minimised HCRB, 1/4 + e^{-2r}.
"""

import numpy as np

from gaussian_hcrb import (
    MinimizerConfig,
    ModelPoint,
    double_homodyne_fisher_two,
    minimize_h,
    sld_crb,
)
from gaussian_hcrb.gaussian_core import balanced_bs_symplectic, two_mode_squeezed_cov

r = 0.7
S = balanced_bs_symplectic()
print("beam splitter on the squeezed covariance:\n", np.round(S @ two_mode_squeezed_cov(r) @ S.T, 6))

cfg = MinimizerConfig(restarts=12, seed=1)
print(f"{'r':>5} {'C^S':>10} {'C^H num':>12} {'double hom.':>12}")
for r in np.arange(0, 1.51, 0.25):
    ch = minimize_h(ModelPoint.two(r=r), cfg).value
    dh = np.trace(np.linalg.inv(double_homodyne_fisher_two(r)))
    print(f"{r:5.2f} {sld_crb(ModelPoint.two(r=r)):10.6f} {ch:12.8f} {dh:12.8f}")
