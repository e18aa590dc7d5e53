"""The bump-weight space whose curvature deficit is bounded but which is not
similar to the backward shift on M_n.

Starting from the M_n weights ``w~_j = j!(n-1)!/(n+j-1)!``, a tent of
multiplicative factors ``1, 2, ..., i, ..., 2, 1`` is laid on the indices
``N_i + 1 .. N_i + 2i - 1`` for each ``i = 2..i_max``, with
``N_i = ceil(i 2^(2i+3) n^n / (n-1)!)``.  Because every factor is >= 1 the
normalized kernel stays <= 1; because the bumps are sparse and far out the
deficit of bump i is below ``2^-(i+2)``, so the normalized kernel stays above
7/8.  Meanwhile the prefix weight products drift by ``log i`` at bump i and
``lambda_{N_2+1}`` is about 2, far above the n-hypercontractive bound.

Only finitely many bumps are built, so non-similarity is reported as growth
evidence ``log 2, ..., log i_max`` rather than proved.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .exact_arith import binomial
from .hypercontraction import (
    first_negative_defect,
    is_n_hypercontractive,
    max_order_bound,
    ratio_bound,
    ratio_bound_check,
)
from .kernel_analysis import (
    KernelCertificate,
    _psi_laplacian_series,
    kernel_bound_certificate,
    make_profile,
    model_curvature,
    curvature,
    psi,
    radial_laplacian_fd,
    radius_grid,
)
from .similarity import ShieldsEvidence, shields_report
from .weights import WeightSequence, standard_mn

__all__ = [
    "BumpConstruction",
    "CounterexampleReport",
    "CounterexampleFailure",
    "capital_m",
    "capital_n",
    "bump_factor",
    "bump_weights",
    "build_construction",
    "deficit",
    "run_counterexample",
    "DEFAULT_GRID",
]

DEFAULT_GRID = (0.0, 0.95, 0.05)


def capital_m(i: int) -> tuple[Fraction, int]:
    """``(M_i, i 2^(i+1))``.

    All summands of the sup share a sign and grow with |w|, so the sup is the
    ``|w| -> 1`` limit ``2^i [sum_{j=2}^{i} (1-1/j) + sum_{j=2}^{i-1} (1-1/j)]``.
    """
    if i < 2:
        raise ValueError(f"bump index must be >= 2, got {i}")
    s = sum((1 - Fraction(1, j) for j in range(2, i + 1)), Fraction(0))
    s += sum((1 - Fraction(1, j) for j in range(2, i)), Fraction(0))
    m = 2**i * s
    bound = i * 2 ** (i + 1)
    if not m < bound:
        raise ArithmeticError(f"M_{i} = {m} is not below {bound}")
    return m, bound


def _n_formula(i: int, n: int) -> int:
    q = Fraction(i * 2 ** (2 * i + 3) * n**n, math.factorial(n - 1))
    return math.ceil(q)


def capital_n(i: int, n: int) -> int:
    """``N_i = ceil(i 2^(2i+3) n^n / (n-1)!)``, checked against its constraints."""
    if i < 2 or n < 2:
        raise ValueError(f"need i >= 2 and n >= 2, got i={i}, n={n}")
    N = _n_formula(i, n)
    m, _ = capital_m(i)
    needed = Fraction(2 ** (i + 2)) * m * n**n / math.factorial(n - 1) - n
    if not N > n - 2:
        raise ArithmeticError(f"N_{i} = {N} is not > n - 2")
    if not N > needed:
        raise ArithmeticError(f"N_{i} = {N} does not exceed the deficit threshold {needed}")
    if not N + 2 * i < _n_formula(i + 1, n):
        raise ArithmeticError(f"bump windows {i} and {i + 1} overlap")
    return N


def bump_factor(j: int, N: dict[int, int]) -> int:
    """Multiplier ``w_j / w~_j``: ``l`` at ``N_i + l`` and ``N_i + 2i - l``, else 1."""
    for i, Ni in N.items():
        d = j - Ni
        if 1 <= d <= 2 * i - 1:
            return min(d, 2 * i - d)
    return 1


def bump_weights(n: int, i_max: int) -> WeightSequence:
    """Exact bump weights with tents for ``i = 2..i_max``."""
    if n < 2 or i_max < 2:
        raise ValueError(f"need n >= 2 and i_max >= 2, got n={n}, i_max={i_max}")
    N = {i: capital_n(i, n) for i in range(2, i_max + 1)}

    @lru_cache(maxsize=None)
    def w(j: int) -> Fraction:
        return Fraction(bump_factor(j, N), binomial(n + j - 1, j))

    params = {"n": n, "i_max": i_max, "N": N, "last_modified": N[i_max] + 2 * i_max - 2}
    return WeightSequence("bump", params, w)


@dataclass(frozen=True)
class BumpConstruction:
    n: int
    i_max: int
    N: dict
    M: dict  # i -> (M_i, i 2^(i+1))
    weights: WeightSequence = field(repr=False)

    @property
    def depth(self) -> int:
        """Index past which every weight is unmodified."""
        return self.N[self.i_max] + 2 * self.i_max

    def window(self, i: int) -> range:
        return range(self.N[i] + 1, self.N[i] + 2 * i)

    def tent_symmetric(self) -> bool:
        return all(
            bump_factor(self.N[i] + l, self.N) == bump_factor(self.N[i] + 2 * i - l, self.N)
            for i in self.N
            for l in range(2 * i + 1)
        )


def build_construction(n: int, i_max: int) -> BumpConstruction:
    seq = bump_weights(n, i_max)
    N = seq.params["N"]
    return BumpConstruction(n, i_max, dict(N), {i: capital_m(i) for i in N}, seq)


def deficit(con: BumpConstruction, i: int, t: float) -> float:
    """``|g_i(t)| (1-t)^n``: bump i's perturbation of the normalized kernel."""
    n = con.n
    js = list(con.window(i))
    coef = np.array(
        [float(Fraction(binomial(n + j - 1, j), bump_factor(j, con.N)) - binomial(n + j - 1, j))
         for j in js]
    )
    g = math.fsum(coef * np.power(t, np.array(js, dtype=float)))
    return abs(g) * (1.0 - t) ** n


@dataclass(frozen=True)
class CounterexampleReport:
    """Certificate bundle for one finite bump construction."""

    n: int
    i_max: int
    J: int
    N: dict
    M: dict
    grid: tuple
    tolerances: dict
    kernel: KernelCertificate
    violation_index: int | None
    violation_ratio: Fraction | None
    violation_bound: Fraction | None
    first_defect_violation: tuple | None  # (k, i, D_k(i))
    order_n_witness: tuple | None  # (i, D_n(i))
    max_order: int | float
    shields: ShieldsEvidence = field(repr=False)
    peaks: dict  # i -> (index, L(index), log i)
    psi_range: tuple
    deficits: dict  # i -> max over grid of |g_i|(1-t)^n
    series_residual_max: float
    fd_residual_max: float
    tent_symmetric: bool
    checks: dict

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def failures(self) -> list[str]:
        return [k for k, ok in self.checks.items() if not ok]


class CounterexampleFailure(RuntimeError):
    def __init__(self, report: CounterexampleReport):
        super().__init__("counterexample certificate failed: " + ", ".join(report.failures))
        self.report = report


def run_counterexample(
    n: int = 2,
    i_max: int | None = None,
    grid: Sequence[float] | None = None,
    tail_tol: float = 0.01,
    h: float = 1e-3,
    series_tol: float = 1e-8,
    fd_tol: float = 1e-3,
    fd_t_max: float = 0.8,
    peak_tol: float = 1e-9,
    psi_rounding: float = 64 * sys.float_info.epsilon,
    slack: int = 0,
    strict: bool = True,
) -> CounterexampleReport:
    """Build the bump weights and check every part of the counterexample.

    ``i_max`` defaults to 3 for n = 2 and 2 otherwise; the truncation depth
    is ``N_{i_max} + 2 i_max + slack``.  With ``strict`` a failed check
    raises :class:`CounterexampleFailure` carrying the full report.
    """
    if i_max is None:
        i_max = 3 if n == 2 else 2
    con = build_construction(n, i_max)
    seq = con.weights
    J = con.depth + slack
    radii = sorted(grid) if grid is not None else radius_grid(*DEFAULT_GRID)
    profile = make_profile(seq, J, n)

    cert = kernel_bound_certificate(profile, radii, tail_tol)
    ts = [p[1] for p in cert.points]

    vj = ratio_bound_check(seq, n, J)
    v_ratio = seq(vj + 1) / seq(vj) if vj is not None else None
    v_bound = ratio_bound(n, vj) if vj is not None else None
    defect = is_n_hypercontractive(seq, n, J)
    witness = first_negative_defect(seq, n, J)

    ref = standard_mn(n)
    shields = shields_report(seq.ratios(), ref.ratios(), J)
    peaks = {}
    for i in range(2, i_max + 1):
        idx = con.N[i] + i - 1
        peaks[i] = (idx, shields.log_prefix[idx], math.log(i))

    psis = [psi(profile, n, t) for t in ts]
    deficits = {i: max((deficit(con, i, t) for t in ts), default=0.0) for i in range(2, i_max + 1)}

    series_res, fd_res = [], []
    for t in ts:
        rhs = model_curvature(n, t) - curvature(profile, t)
        series_res.append(abs(_psi_laplacian_series(profile, n, t) - rhs))
        if t <= fd_t_max:
            fd = radial_laplacian_fd(lambda s: psi(profile, n, s), t, h)
            fd_res.append(abs(fd - rhs))

    checks = {
        "kernel_lower_bound": cert.lower_ok and bool(cert.points),
        "kernel_upper_bound": cert.upper_ok,
        "ratio_bound_violated": vj is not None and vj == con.N[2] + 1,
        "not_hypercontractive": not defect.holds and witness is not None,
        "max_order_zero": max_order_bound(seq, J) == 0,
        "shields_peaks": all(abs(abs(L) - li) < peak_tol for _, L, li in peaks.values()),
        # psi <= 0 is certified exactly by domination; the float value may sit a few ulp above
        "psi_range": all(math.log(7 / 8) < p <= psi_rounding for p in psis),
        "deficit_bound": all(deficits[i] < 2.0 ** -(i + 2) for i in deficits),
        "series_residual": max(series_res, default=0.0) < series_tol,
        "fd_residual": max(fd_res, default=0.0) < fd_tol,
        "tent_symmetric": con.tent_symmetric(),
    }
    report = CounterexampleReport(
        n=n,
        i_max=i_max,
        J=J,
        N=dict(con.N),
        M=dict(con.M),
        grid=tuple(radii),
        tolerances={
            "tail_tol": tail_tol,
            "h": h,
            "series_tol": series_tol,
            "fd_tol": fd_tol,
            "fd_t_max": fd_t_max,
            "peak_tol": peak_tol,
            "psi_rounding": psi_rounding,
        },
        kernel=cert,
        violation_index=vj,
        violation_ratio=v_ratio,
        violation_bound=v_bound,
        first_defect_violation=defect.violation,
        order_n_witness=witness,
        max_order=max_order_bound(seq, J),
        shields=shields,
        peaks=peaks,
        psi_range=(min(psis, default=math.nan), max(psis, default=math.nan)),
        deficits=deficits,
        series_residual_max=max(series_res, default=0.0),
        fd_residual_max=max(fd_res, default=0.0),
        tent_symmetric=checks["tent_symmetric"],
        checks=checks,
    )
    if strict and not report.passed:
        raise CounterexampleFailure(report)
    return report
