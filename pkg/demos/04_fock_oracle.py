"""
Cross-checking the closed forms in a truncated Fock space
=========================================================

States are built by exponentiating ladder-operator generators and
differentiated numerically. Their geometry reproduces the closed-form QFI
and Uhlmann curvature, and the beam splitter really factorises the two-mode
state.
"""

import numpy as np

from gaussian_hcrb import ModelPoint, qfi_matrix
from gaussian_hcrb import fock_oracle as fo

p = ModelPoint.single(0.3, 0.7, 0.75)
Q, D = fo.oracle_qfi_uhlmann(p)
print("oracle QFI:\n", np.round(Q, 6))
print("max deviation from closed form:", np.abs(Q - qfi_matrix(p)).max())
print("oracle Uhlmann curvature:\n", np.round(D, 6))

policy = fo.TruncationPolicy(tail_tol=1e-18)
for theta in ((0, 0, 0.5), (0.5, 0.5, 0.8), (1, 0, 1.2)):
    q = ModelPoint.two(*theta)
    print(theta, "cutoff", fo.resolve_truncation(q, policy).N,
          "beam-splitter residual", f"{fo.bs_factorization_check(q, policy):.2e}")

# too small a cutoff is refused instead of silently returning a wrong state
try:
    fo.model_state(ModelPoint.two(1, 0, 1.2), fo.TruncationPolicy(N=30))
except fo.TruncationError as exc:
    print("refused:", exc)
