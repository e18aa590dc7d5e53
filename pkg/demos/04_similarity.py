"""Shields' test in the log domain, and two direct sums whose curvature traces
agree although the operators are not similar."""

# %%
from wshift.similarity import shields_report, shift_similarity_demo, trace_curvature_direct_sum
from wshift.weights import standard_mn

# %% M_1 against M_2: the prefix log-ratio is log(j+2) and never levels off
ev = shields_report(standard_mn(1).ratios(), standard_mn(2).ratios(), 200)
print(ev.trend, round(ev.spread, 4))

# %% S*_1 + S*_3 versus S*_2 + S*_2
for t in (0.0, 0.5, 0.9):
    print(t, trace_curvature_direct_sum([1, 3], t), trace_curvature_direct_sum([2, 2], t))
v = shift_similarity_demo([1, 3], [2, 2])
print("similar:", v.similar)
for a, b, e in v.pairs:
    print(f"  pair ({a}, {b}): {e.trend}, spread {e.spread:.3f}")
