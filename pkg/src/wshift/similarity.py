"""Shields' similarity test for weighted shifts, in the log domain.

Two shifts with ratio sequences lambda and lambda~ are similar iff all window
products ``prod_{k..j} lambda / lambda~`` stay between positive constants.
With the prefix sums ``L(j) = sum_{k<=j} log(lambda_k / lambda~_k)`` and
``L(-1) = 0`` every window product is ``exp(L(j) - L(k-1))``, so a finite
scan reduces to running extrema of L.  Only evidence up to ``J`` is ever
produced here; the verdict for closed-form families comes from the
multiset criterion for direct sums of M_alpha backward shifts.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .kernel_analysis import _check_t, model_curvature
from .weights import RatioView

__all__ = [
    "DEFAULT_DIVERGENCE_THRESHOLD",
    "ShieldsEvidence",
    "SimilarityVerdict",
    "log_ratio",
    "shields_report",
    "order_ratios",
    "shift_similarity_demo",
    "trace_curvature_direct_sum",
]

DEFAULT_DIVERGENCE_THRESHOLD = math.log(50)
_PEAK_EPS = 1e-12


def log_ratio(a, b) -> float:
    """``log(a / b)`` for positive a, b, accurate when a/b is close to 1."""
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        q = Fraction(a) / Fraction(b)
        d = q - 1
        if abs(d) < Fraction(1, 2):
            return math.log1p(float(d))
        return math.log(q.numerator) - math.log(q.denominator)
    return math.log(float(a) / float(b))


@dataclass(frozen=True)
class ShieldsEvidence:
    """Prefix log-ratio table and its extrema over ``0..J``.

    ``log_c2``/``log_c1`` are the log of the best Shields constants over all
    windows ``0 <= k <= j <= J`` (they include windows starting at 0, i.e.
    the baseline ``L(-1) = 0``); ``spread = max_log - min_log``.
    """

    J: int
    log_prefix: tuple[float, ...]
    max_log: float
    min_log: float
    spread: float
    log_c2: float
    log_c1: float
    trend: str
    peak_witnesses: tuple[int, ...]
    threshold: float

    @property
    def constant_ratio_log(self) -> float:
        """``log(C2 / C1)`` for the best constants up to J."""
        return self.log_c2 - self.log_c1


def _classify(L: Sequence[float], spread: float, threshold: float) -> str:
    if spread < threshold:
        return "bounded"
    peak = max(abs(v) for v in L)
    if abs(L[-1]) >= peak - _PEAK_EPS:
        return "monotone-divergent"
    return "oscillating-unbounded-evidence"


def _peaks(L: Sequence[float]) -> tuple[int, ...]:
    out = []
    for j in range(1, len(L) - 1):
        up, down = L[j] - L[j - 1], L[j] - L[j + 1]
        if (up > _PEAK_EPS and down > _PEAK_EPS) or (up < -_PEAK_EPS and down < -_PEAK_EPS):
            out.append(j)
    return tuple(out)


def shields_report(
    lam: RatioView,
    lam_tilde: RatioView,
    J: int,
    divergence_threshold: float = DEFAULT_DIVERGENCE_THRESHOLD,
) -> ShieldsEvidence:
    """Scan the prefix log-ratios of two ratio sequences up to index J."""
    if J < 0:
        raise ValueError(f"J must be >= 0, got {J}")
    L = []
    s = c = 0.0  # Neumaier running sum
    for k in range(J + 1):
        x = log_ratio(lam(k), lam_tilde(k))
        tot = s + x
        c += (s - tot) + x if abs(s) >= abs(x) else (x - tot) + s
        s = tot
        L.append(s + c)

    hi = lo = 0.0  # running extrema of L(-1..j-1)
    log_c2 = -math.inf
    log_c1 = math.inf
    for v in L:
        log_c2 = max(log_c2, v - lo)
        log_c1 = min(log_c1, v - hi)
        hi, lo = max(hi, v), min(lo, v)

    max_log, min_log = max(L), min(L)
    spread = max_log - min_log
    return ShieldsEvidence(
        J=J,
        log_prefix=tuple(L),
        max_log=max_log,
        min_log=min_log,
        spread=spread,
        log_c2=log_c2,
        log_c1=log_c1,
        trend=_classify(L, spread, divergence_threshold),
        peak_witnesses=_peaks(L),
        threshold=divergence_threshold,
    )


def _order(a) -> Fraction:
    q = Fraction(str(a)) if isinstance(a, float) else Fraction(a)
    if q < 1:
        raise ValueError(f"orders must be >= 1, got {a}")
    return q


def order_ratios(alpha) -> RatioView:
    """``lambda_k = (k+1)/(alpha+k)``, the ratios of the M_alpha weights."""
    a = _order(alpha)
    return RatioView(lambda k: Fraction(k + 1) / (a + k))


@dataclass(frozen=True)
class SimilarityVerdict:
    similar: bool
    orders_a: tuple[Fraction, ...]
    orders_b: tuple[Fraction, ...]
    pairs: tuple  # (alpha, beta, ShieldsEvidence) for each unequal sorted pair
    unmatched: tuple[Fraction, ...]


def shift_similarity_demo(
    orders_a: Sequence,
    orders_b: Sequence,
    J: int = 200,
    divergence_threshold: float = DEFAULT_DIVERGENCE_THRESHOLD,
) -> SimilarityVerdict:
    """Similarity of direct sums of M_alpha backward shifts.

    The sums are similar iff the order lists agree as multisets.  Orders are
    paired after sorting; every unequal pair gets Shields divergence evidence.
    """
    a = sorted(_order(x) for x in orders_a)
    b = sorted(_order(x) for x in orders_b)
    pairs = tuple(
        (x, y, shields_report(order_ratios(x), order_ratios(y), J, divergence_threshold))
        for x, y in zip(a, b)
        if x != y
    )
    k = min(len(a), len(b))
    return SimilarityVerdict(
        similar=Counter(a) == Counter(b),
        orders_a=tuple(a),
        orders_b=tuple(b),
        pairs=pairs,
        unmatched=tuple(a[k:] + b[k:]),
    )


def trace_curvature_direct_sum(orders: Sequence, t: float) -> float:
    """Trace of the curvature of a direct sum: ``-(sum alpha_k) / (1-t)^2``."""
    _check_t(t)
    return math.fsum(model_curvature(float(_order(a)), t) for a in orders)
