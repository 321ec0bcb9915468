"""
Single-mode bounds for a displaced squeezed vacuum
==================================================

Estimate Re alpha, Im alpha and r of D(alpha)S(r)|0> at once. The SLD bound
and the Holevo bound differ by exactly 1/2 for every squeezing, and both grow
with r: squeezing does not help when all three parameters are unknown.
"""

import numpy as np

from gaussian_hcrb import (
    ModelPoint,
    hcrb_closed,
    minimize_h,
    qfi_matrix,
    quantumness,
    sld_crb,
    uhlmann_matrix,
)

# The QFI matrix is diagonal and blind to the displacement
p = ModelPoint.single(0.3, 0.7, 0.5)
print("QFI at r=0.5:\n", np.round(qfi_matrix(p), 6))
print("R =", quantumness(qfi_matrix(p), uhlmann_matrix(p)))

# Numerical HCRB against the closed form
print(f"{'r':>5} {'C^S':>10} {'C^H num':>12} {'C^H closed':>12} {'gap':>8}")
for r in np.linspace(0, 1.5, 7):
    p = ModelPoint.single(r=r)
    num = minimize_h(p).value
    print(f"{r:5.2f} {sld_crb(p):10.6f} {num:12.8f} {hcrb_closed(p):12.8f} {num - sld_crb(p):8.5f}")
