"""Weighted backward shifts: n-hypercontractivity, kernel curvature, similarity.

Modules
-------
exact_arith
    Exact binomial identities and the two banded lemma systems.
weights
    Weight sequences ``w_j`` and their ratios ``lambda_j = w_{j+1}/w_j``.
hypercontraction
    Defect diagonals, truncated n-hypercontractivity, the ratio bound.
kernel_analysis
    Kernel series, curvature, psi, and the 7/8 - 9/8 certificate.
similarity
    Shields' criterion and the direct-sum trace example.
counterexample
    The bump-weight construction and its end-to-end report.
cli
    ``wshift`` command line (``python -m wshift``).
"""

from .exact_arith import (
    binomial,
    build_lemma_system,
    closed_form_solution,
    identity_end,
    identity_first,
    identity_second,
    solve_exact,
    vanishing_coefficient,
    verify_lemma,
)
from .weights import WeightSequence, explicit, load_spec, ratio, save_spec, standard_mn, validate
from .hypercontraction import (
    DefectReport,
    defect_diagonal,
    is_n_hypercontractive,
    max_order_bound,
    ratio_bound_check,
    reversed_defect,
)
from .kernel_analysis import (
    KernelProfile,
    curvature,
    identity_residual,
    kernel_bound_certificate,
    kernel_value,
    make_profile,
    model_curvature,
    psi,
    psi_shifted,
    tail_majorant,
)
from .similarity import shields_report, shift_similarity_demo, trace_curvature_direct_sum
from .counterexample import bump_weights, capital_m, capital_n, run_counterexample

__version__ = "0.1.0"
