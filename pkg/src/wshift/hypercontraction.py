"""Defect diagonals of weighted backward shifts and the ratio bound.

For the backward shift ``T`` on H^2_w, ``T^{*j} T^j`` is diagonal with entry
``lambda_{i-1} ... lambda_{i-j}`` at basis index ``i >= j`` and 0 below, so
the order-k defect ``sum_j (-1)^j C(k,j) T^{*j} T^j`` is diagonal with

    D_k(i) = 1 + sum_{j=1}^{min(k,i)} (-1)^j C(k,j) lambda_{i-1} ... lambda_{i-j}.

An n-hypercontraction needs ``D_k(i) >= 0`` for all ``k <= n`` and all ``i``;
everything here is decided only up to a truncation index ``J``.  When the
ratios are Fractions all comparisons are exact.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact_arith import binomial
from .weights import RatioView, WeightSequence, ratios_from_values, standard_mn

__all__ = [
    "DefectReport",
    "defect_diagonal",
    "is_n_hypercontractive",
    "first_negative_defect",
    "ratio_bound",
    "ratio_bound_check",
    "max_order_bound",
    "reversed_defect",
    "bound_decomposition",
    "greedy_extremal_ratios",
    "random_defect_nonnegative_ratios",
]


def _as_ratios(seq) -> RatioView:
    if isinstance(seq, WeightSequence):
        return seq.ratios()
    if isinstance(seq, RatioView):
        return seq
    return ratios_from_values(seq)


def _defects_at(lam, i: int, n: int) -> list:
    """``[D_1(i), ..., D_n(i)]`` sharing the prefix products."""
    prods = []
    p = 1
    for j in range(1, min(n, i) + 1):
        p = p * lam(i - j)
        prods.append(p)
    out = []
    for k in range(1, n + 1):
        s = 1
        for j in range(1, min(k, i) + 1):
            s = s + (-1) ** j * binomial(k, j) * prods[j - 1]
        out.append(s)
    return out


def defect_diagonal(ratios, k: int, i: int):
    """D_k(i); ``ratios`` is a RatioView, WeightSequence or list of lambdas."""
    if k < 1 or i < 0:
        raise ValueError(f"need k >= 1 and i >= 0, got k={k}, i={i}")
    lam = _as_ratios(ratios)
    s = Fraction(1)
    p = 1
    for j in range(1, min(k, i) + 1):
        p = p * lam(i - j)
        s = s + (-1) ** j * binomial(k, j) * p
    return s


@dataclass(frozen=True)
class DefectReport:
    """Verdict of truncated n-hypercontractivity testing.

    ``violation`` is ``(k, i, D_k(i))`` for the first negative defect in
    (index, order) order, or None when every ``D_k(i) >= 0`` with
    ``0 <= i <= J``.  Nothing is claimed beyond ``J``.
    """

    n: int
    J: int
    violation: tuple | None = None
    witness_values: dict | None = field(default=None, compare=False)

    @property
    def holds(self) -> bool:
        return self.violation is None

    @property
    def verdict(self) -> str:
        return "holds_up_to_J" if self.holds else "violated"


def is_n_hypercontractive(seq, n: int, J: int, keep_witness: bool = False) -> DefectReport:
    """Check ``D_k(i) >= 0`` for ``1 <= k <= n`` and ``0 <= i <= J``.

    With ``keep_witness`` the full table ``{(k, i): D_k(i)}`` scanned so far
    is attached to the report.
    """
    if n < 1 or J < 0:
        raise ValueError(f"need n >= 1 and J >= 0, got n={n}, J={J}")
    lam = _as_ratios(seq)
    table = {} if keep_witness else None
    for i in range(J + 1):
        for k, d in enumerate(_defects_at(lam, i, n), start=1):
            if table is not None:
                table[(k, i)] = d
            if d < 0:
                return DefectReport(n, J, (k, i, d), table)
    return DefectReport(n, J, None, table)


def first_negative_defect(seq, k: int, J: int) -> tuple | None:
    """``(i, D_k(i))`` for the least ``i <= J`` with a negative order-k defect."""
    lam = _as_ratios(seq)
    for i in range(J + 1):
        d = defect_diagonal(lam, k, i)
        if d < 0:
            return i, d
    return None


def ratio_bound(n: int, j: int) -> Fraction:
    """The necessary bound (1+j)/(n+j) on lambda_j for an n-hypercontraction."""
    return Fraction(1 + j, n + j)


def ratio_bound_check(seq, n: int, J: int) -> int | None:
    """Least ``j <= J-1`` with ``lambda_j > (1+j)/(n+j)``, else None."""
    lam = _as_ratios(seq)
    for j in range(J):
        if lam(j) > ratio_bound(n, j):
            return j
    return None


def max_order_bound(seq, J: int) -> float | int:
    """Largest n compatible with the ratio bound on ``lambda_0..lambda_{J-1}``.

    Returns ``floor(min_j ((1+j)/lambda_j - j))``, clamped below at 0, or
    ``math.inf`` when ``J == 0`` leaves nothing to constrain.
    """
    lam = _as_ratios(seq)
    best = None
    for j in range(J):
        v = Fraction(1 + j) / Fraction(lam(j)) - j
        if best is None or v < best:
            best = v
    if best is None:
        return math.inf
    return max(0, math.floor(best))


def reversed_defect(n: int, m: int) -> Fraction:
    """m-th diagonal entry of ``sum_j (-1)^j C(n,j) S_n^j S_n^{*j}`` on M_n.

    ``S_n^j S_n^{*j} z^m = (w_m / w_{m-j}) z^m`` for ``j <= m``, so this is 1
    at ``m = 0`` and vanishes on span{z^m : m >= 1}.
    """
    if n < 1 or m < 0:
        raise ValueError(f"need n >= 1 and m >= 0, got n={n}, m={m}")
    w = standard_mn(n)
    return sum((Fraction((-1) ** j * binomial(n, j)) * w(m) / w(m - j)
                for j in range(min(n, m) + 1)), Fraction(0))


def bound_decomposition(lams: Sequence, n: int, K: int) -> tuple:
    """Split D_n(K) into the leading term and the lemma-weighted corrections.

    With ``x_j = -C(n+j-2, j) (K-j)/K`` one has exactly

        D_n(K) = [1 - (n + x_1) lambda_{K-1}]
                 + sum_{j=1}^{K-1} x_j D_n(K-j) lambda_{K-1} ... lambda_{K-j},

    and ``1/(n + x_1) = K/(n+K-1)``.  Since every ``x_j < 0`` (n >= 2), the
    corrections are <= 0 whenever the earlier defects are >= 0, which forces
    the leading term to be >= 0.

    Returns ``(D_n(K), leading, corrections)``.
    """
    if K < 1 or n < 1:
        raise ValueError(f"need n >= 1 and K >= 1, got n={n}, K={K}")
    lam = _as_ratios(lams)
    x = [Fraction(-binomial(n + j - 2, j) * (K - j), K) for j in range(1, K)]
    x1 = x[0] if x else 0
    leading = 1 - (n + x1) * lam(K - 1)
    corrections = []
    p = 1
    for j in range(1, K):
        p = p * lam(K - j)
        corrections.append(x[j - 1] * defect_diagonal(lam, n, K - j) * p)
    return defect_diagonal(lam, n, K), leading, corrections


def _affine_coefficient(lams: list, n: int) -> Fraction | float:
    # D_n(i+1) = 1 + lambda_i * a with i = len(lams)
    i = len(lams)
    a = 0
    p = 1
    for j in range(1, min(n, i + 1) + 1):
        a = a + (-1) ** j * binomial(n, j) * p
        if j <= i:
            p = p * lams[i - j]
    return a


def greedy_extremal_ratios(n: int, K: int) -> list[Fraction]:
    """Take each lambda_i as large as D_n(i+1) >= 0 allows, exactly."""
    lams: list[Fraction] = []
    for _ in range(K):
        a = _affine_coefficient(lams, n)
        if a >= 0:
            raise ArithmeticError("order-n defect does not bound the next ratio")
        lams.append(-1 / Fraction(a))
    return lams


def random_defect_nonnegative_ratios(
    n: int,
    K: int,
    rng: random.Random,
    all_orders: bool = True,
    max_retries: int = 64,
) -> list[Fraction]:
    """Random ``lambda_0..lambda_{K-1}`` with ``D_n(i) >= 0`` for ``i <= K``.

    Each lambda_i is drawn uniformly from ``(0, u_i]`` where ``u_i`` solves
    ``D_n(i+1) = 0`` (or 1 if the affine coefficient is not negative), in
    floating point, then converted exactly to a Fraction and re-checked in
    exact arithmetic.  With ``all_orders`` the lower orders ``D_k``, k < n,
    are required as well.  Failed draws are retried, then ``u_i`` shrinks.
    """
    lams: list[Fraction] = []
    orders = range(1, n + 1) if all_orders else (n,)
    for i in range(K):
        a = float(_affine_coefficient(lams, n))
        u = -1.0 / a if a < 0 else 1.0
        for attempt in range(10 * max_retries):
            if attempt and attempt % max_retries == 0:
                u *= 0.5
            cand = Fraction(u * (1.0 - rng.random()))
            trial = lams + [cand]
            d = _defects_at(trial.__getitem__, i + 1, n)
            if all(d[k - 1] >= 0 for k in orders):
                lams.append(cand)
                break
        else:
            raise RuntimeError(f"could not extend sequence at index {i}")
    return lams
