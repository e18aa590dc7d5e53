"""The bump weights: the kernel stays within 7/8 and 9/8 of the M_2 kernel,
yet the ratio bound fails and the Shields log-ratios keep growing."""

# %%
from wshift.counterexample import build_construction, run_counterexample

con = build_construction(2, 3)
print("N:", con.N, "M:", con.M)

# %% The full certificate on the default grid r = 0, 0.05, ..., 0.95
rep = run_counterexample(2, 3)
print("passed:", rep.passed)
print("ratio bound fails at j =", rep.violation_index, ":", rep.violation_ratio, ">", rep.violation_bound)
print("peaks |L| at", {i: (idx, round(abs(L), 12)) for i, (idx, L, _) in rep.peaks.items()})
print("smallest margin over 7/8:", min(p[3] for p in rep.kernel.points))

# %% Close to the boundary the bumps do show; a deeper truncation keeps every point
rep = run_counterexample(2, 3, grid=[0.99, 0.999, 0.9999], slack=100_000)
for r, t, value, margin, tail in rep.kernel.points:
    print(f"r={r}: F(1-t)^2 = {value:.6f}, tail {tail:.1e}")
