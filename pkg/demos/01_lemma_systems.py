"""Exact banded systems behind the ratio bound, and the binomial identities
that make their closed forms work."""

# %% The x1 system for n = 3, k = 3 and its closed-form solution
from wshift.exact_arith import (
    build_lemma_system,
    closed_form_solution,
    identity_first,
    solve_exact,
    vanishing_coefficient,
    verify_lemma,
)

s = build_lemma_system("x1", 3, 3)
print("matrix", [[str(v) for v in row] for row in s.matrix], "rhs", [str(v) for v in s.rhs])
print("closed form", [str(v) for v in closed_form_solution(s)])
print("Gaussian elimination", [str(v) for v in solve_exact(s.matrix, s.rhs)])

# %% Every system up to n = 8 checks out with zero residual
ok = all(
    verify_lemma(build_lemma_system(kind, n, p))[0]
    for n in range(2, 9)
    for kind, ps in (("x1", range(2, n + 1)), ("x2", range(2, 9)))
    for p in ps
)
print("all systems verified:", ok)

# %% The identities are coefficient extractions, so they vanish exactly
print([str(identity_first(5, m)) for m in range(2, 8)])
print([str(vanishing_coefficient(4, m)) for m in range(0, 8)])
