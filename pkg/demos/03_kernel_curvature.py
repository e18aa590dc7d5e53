"""Truncated kernels, their curvature, and the tail bound that says how far
out on the disk a truncation can be trusted."""

# %%
import numpy as np

from wshift.kernel_analysis import (
    curvature,
    depth_for_tail,
    kernel_value,
    make_profile,
    model_curvature,
    tail_majorant,
)
from wshift.weights import standard_mn

# %% F(t) for M_2 is (1-t)^(-2); the truncation approaches it from below
prof = make_profile(standard_mn(2), 200)
print(kernel_value(prof, 0.5), "vs", 4.0)
print("tail beyond J=200 at t=0.5:", tail_majorant(2, 200, 0.5))

# %% Curvature agrees with -n/(1-t)^2 once the truncation is deep enough
for t in np.linspace(0, 0.9, 4):
    J = depth_for_tail(3, t, 1e-12)
    k = curvature(make_profile(standard_mn(3), J), t)
    print(f"t={t:.2f} J={J:4d} K={k:.10f} model={model_curvature(3, t):.10f}")
