"""Defect diagonals, the truncated n-hypercontraction test, and the
necessary ratio bound lambda_j <= (1+j)/(n+j)."""

# %%
import random

from wshift.hypercontraction import (
    defect_diagonal,
    is_n_hypercontractive,
    max_order_bound,
    random_defect_nonnegative_ratios,
    ratio_bound,
    ratio_bound_check,
    reversed_defect,
)
from wshift.weights import ratios_from_values, standard_mn

# %% M_2 sits exactly on the boundary: its order-2 defects vanish after i = 0
w = standard_mn(2)
print([str(defect_diagonal(w, 2, i)) for i in range(6)])
print(is_n_hypercontractive(w, 2, 200).verdict)

# %% The Hardy space is a contraction but not a 2-hypercontraction
print(is_n_hypercontractive(standard_mn(1), 2, 10).violation)

# %% Random sequences with nonnegative defects never exceed the ratio bound
rng = random.Random(1)
worst = 0.0
for _ in range(50):
    lams = random_defect_nonnegative_ratios(3, 40, rng)
    assert ratio_bound_check(ratios_from_values(lams), 3, 40) is None
    worst = max(worst, max(float(l / ratio_bound(3, j)) for j, l in enumerate(lams)))
print(f"largest lambda_j / bound over 50 samples: {worst:.4f}")

# %% The largest order compatible with the ratios, and the reversed defect on M_3
print("max order of M_3:", max_order_bound(standard_mn(3), 500))
print([str(reversed_defect(3, m)) for m in range(6)])
