"""Truncated kernel series, eigenvector-bundle curvature, and psi.

All quantities are radial, evaluated in ``t = |w|^2``.  The kernel on the
diagonal is ``F(t) = sum_j t^j / w_j``; its truncation at ``J`` is a lower
bound since every coefficient is positive.  For a radial function g,
``d dbar g = g'(t) + t g''(t)``, so the curvature of the bundle is

    K_T(t) = -(t (F'' F - F'^2) / F^2 + F' / F).

Derivatives come from the termwise differentiated series, summed with
``math.fsum``.  The omitted tail of a profile dominated by the M_n
coefficients ``C(n+j-1, j)`` is bounded by ``tail_majorant``, computed as
a regularized incomplete beta function (the negative binomial tail).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.special import betainc

from .weights import WeightSequence, standard_mn

__all__ = [
    "LOWER_BOUND",
    "UPPER_BOUND",
    "KernelProfile",
    "KernelCertificate",
    "CurvatureRow",
    "CSV_COLUMNS",
    "make_profile",
    "kernel_value",
    "kernel_derivatives",
    "tail_majorant",
    "normalized_tail",
    "depth_for_tail",
    "curvature",
    "model_curvature",
    "psi",
    "psi_shifted",
    "radial_laplacian_fd",
    "identity_residual",
    "kernel_bound_certificate",
    "curvature_grid",
    "radius_grid",
    "thread_count",
]

LOWER_BOUND = Fraction(7, 8)
UPPER_BOUND = Fraction(9, 8)
PSI_SHIFT = math.log(8 / 7)

CSV_COLUMNS = (
    "r", "t", "F", "F_normalized", "K_T", "K_model", "psi", "residual_series", "residual_fd",
)


def thread_count() -> int:
    """Worker threads for grid evaluation, from ``WSHIFT_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("WSHIFT_THREADS", "1")))
    except ValueError:
        return 1


def _grid_map(func: Callable, items: Sequence) -> list:
    # executor.map preserves input order, so output is deterministic
    workers = thread_count()
    if workers == 1 or len(items) < 2:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def _check_t(t: float) -> None:
    if not (0.0 <= t < 1.0):
        raise ValueError(f"t = |w|^2 must lie in [0, 1), got {t}")


@dataclass(frozen=True)
class KernelProfile:
    """Coefficients ``c_j = 1/w_j``, ``0 <= j <= J``, as float64.

    ``n`` is the comparison order: the tail beyond J is assumed dominated by
    ``C(n+j-1, j)``, which holds for the standard and bump kinds.
    """

    coefficients: np.ndarray = field(repr=False)
    J: int
    n: int
    source: WeightSequence | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        c = self.coefficients
        if self.J < 1 or len(c) != self.J + 1:
            raise ValueError("profile needs J >= 1 and exactly J+1 coefficients")
        if not np.all(c > 0):
            raise ValueError("kernel coefficients must be positive")
        # derivative coefficient tables, cached on the frozen instance
        j = np.arange(self.J + 1, dtype=float)
        object.__setattr__(self, "_d1", (j[1:] * c[1:]))
        object.__setattr__(self, "_d2", (j[2:] * (j[2:] - 1.0) * c[2:]))
        c.setflags(write=False)


def make_profile(seq: WeightSequence, J: int, n: int | None = None) -> KernelProfile:
    """Profile of ``seq`` truncated at ``J``; ``n`` defaults to the sequence's order."""
    if n is None:
        n = seq.params.get("n")
        if n is None:
            raise ValueError("comparison order n is required for this weight kind")
    coeffs = np.array([float(1 / seq(j)) for j in range(J + 1)], dtype=float)
    return KernelProfile(coeffs, J, int(n), seq)


def _powers(t: float, count: int) -> np.ndarray:
    return np.power(t, np.arange(count, dtype=float))


def kernel_value(profile: KernelProfile, t: float) -> float:
    """Truncated ``F(t) = sum_{j<=J} c_j t^j``; a lower bound on the kernel."""
    _check_t(t)
    if t == 0.0:
        return float(profile.coefficients[0])
    return math.fsum(profile.coefficients * _powers(t, profile.J + 1))


def kernel_derivatives(profile: KernelProfile, t: float) -> tuple[float, float, float]:
    """``(F, F', F'')`` of the truncated series at ``t``."""
    _check_t(t)
    pw = _powers(t, profile.J + 1)
    f0 = math.fsum(profile.coefficients * pw)
    f1 = math.fsum(profile._d1 * pw[: profile.J])
    f2 = math.fsum(profile._d2 * pw[: profile.J - 1])
    return f0, f1, f2


def normalized_tail(n: int, J: int, t: float) -> float:
    """``(1-t)^n sum_{j>J} C(n+j-1, j) t^j``, the regularized beta ``I_t(J+1, n)``."""
    _check_t(t)
    if t == 0.0:
        return 0.0
    return float(betainc(J + 1, n, t))


def tail_majorant(n: int, J: int, t: float) -> float:
    """``(1-t)^(-n) - sum_{j<=J} C(n+j-1, j) t^j``, without the cancellation."""
    return normalized_tail(n, J, t) / (1.0 - t) ** n


def depth_for_tail(n: int, t: float, tol: float, start: int = 1) -> int:
    """Smallest ``J >= start`` with ``tail_majorant(n, J, t) < tol``."""
    _check_t(t)
    if tail_majorant(n, start, t) < tol:
        return start
    lo, hi = start, max(2 * start, 2)
    while tail_majorant(n, hi, t) >= tol:
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail_majorant(n, mid, t) < tol:
            hi = mid
        else:
            lo = mid
    return hi


def _admissible(profile: KernelProfile, t: float, tail_tol: float | None) -> None:
    if tail_tol is not None and normalized_tail(profile.n, profile.J, t) >= tail_tol:
        raise ValueError(
            f"t = {t} is outside the admissible range: normalized tail "
            f"{normalized_tail(profile.n, profile.J, t):.3g} >= {tail_tol}"
        )


def curvature(profile: KernelProfile, t: float, tail_tol: float | None = None) -> float:
    """Curvature ``K_T(t) = -(t u'' + u')`` with ``u = log F``."""
    _check_t(t)
    _admissible(profile, t, tail_tol)
    f0, f1, f2 = kernel_derivatives(profile, t)
    return -(t * (f2 * f0 - f1 * f1) / (f0 * f0) + f1 / f0)


def model_curvature(n: float, t: float) -> float:
    """Curvature of the backward shift on M_n: ``-n / (1-t)^2``."""
    _check_t(t)
    return -n / (1.0 - t) ** 2


def psi(profile: KernelProfile, n: int, t: float, tail_tol: float | None = None) -> float:
    """``log(F(t) (1-t)^n)``; <= 0 whenever ``w_j >= C(n+j-1, j)^(-1)`` for all j."""
    _check_t(t)
    _admissible(profile, t, tail_tol)
    return math.log(kernel_value(profile, t)) + n * math.log1p(-t)


def psi_shifted(profile: KernelProfile, n: int, t: float, tail_tol: float | None = None) -> float:
    """``psi + log(8/7)``: positive on certified grids, same d dbar."""
    return psi(profile, n, t, tail_tol) + PSI_SHIFT


def radial_laplacian_fd(g: Callable[[float], float], t: float, h: float) -> float:
    """Quarter Laplacian of ``(x, y) -> g(x^2 + y^2)`` at ``(sqrt(t), 0)``.

    Five-point central differences with step ``h``; approximates
    ``t g''(t) + g'(t)``.
    """
    _check_t(t)
    if not h > 0:
        raise ValueError(f"finite-difference step must be positive, got {h}")
    x = math.sqrt(t)
    if (x + h) ** 2 >= 1.0 or t + h * h >= 1.0:
        raise ValueError(f"step h = {h} leaves the unit disk at t = {t}")
    # g(x^2 + h^2) stands for both y = +h and y = -h
    lap = g((x + h) ** 2) + g((x - h) ** 2) + 2.0 * g(t + h * h) - 4.0 * g(t)
    return lap / (4.0 * h * h)


def _psi_laplacian_series(profile: KernelProfile, n: int, t: float) -> float:
    f0, f1, f2 = kernel_derivatives(profile, t)
    dpsi = f1 / f0 - n / (1.0 - t)
    d2psi = (f2 * f0 - f1 * f1) / (f0 * f0) - n / (1.0 - t) ** 2
    return t * d2psi + dpsi


def identity_residual(profile: KernelProfile, n: int, t: float, h: float = 1e-3) -> tuple[float, float]:
    """Residuals of ``d dbar psi = K_model - K_T``: (series, finite difference)."""
    _check_t(t)
    rhs = model_curvature(n, t) - curvature(profile, t)
    fd_lhs = radial_laplacian_fd(lambda s: psi(profile, n, s), t, h)
    return abs(_psi_laplacian_series(profile, n, t) - rhs), abs(fd_lhs - rhs)


def radius_grid(start: float, stop: float, step: float) -> list[float]:
    """Radii ``start, start+step, ...`` up to and including ``stop``."""
    if step <= 0:
        raise ValueError("grid step must be positive")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    radii = [round(start + k * step, 12) for k in range(count)]
    for r in radii:
        if not 0.0 <= r < 1.0:
            raise ValueError(f"grid radius {r} outside [0, 1)")
    return radii


@dataclass(frozen=True)
class KernelCertificate:
    """Two-sided bound ``7/8 < F(t)(1-t)^n < 9/8`` on a radius grid.

    The lower side is checked pointwise on the truncated series (truncation
    only lowers F).  The upper side is analytic: ``w_j >= C(n+j-1, j)^(-1)``
    for every j gives ``F(t)(1-t)^n <= 1``; it is verified exactly up to J,
    and ``tail_is_standard`` records that weights beyond J are unmodified.
    """

    n: int
    J: int
    tail_tol: float
    points: tuple  # (r, t, normalized value, margin over 7/8, normalized tail)
    excluded: tuple  # (r, normalized tail) for points failing tail_tol
    dominated_up_to_J: bool
    first_undominated: int | None
    tail_is_standard: bool

    @property
    def lower_ok(self) -> bool:
        return all(p[3] > 0 for p in self.points)

    @property
    def upper_ok(self) -> bool:
        return self.dominated_up_to_J and self.tail_is_standard

    @property
    def max_value(self) -> float:
        return max((p[2] for p in self.points), default=float("nan"))

    @property
    def passed(self) -> bool:
        return bool(self.points) and self.lower_ok and self.upper_ok

    @property
    def r_max(self) -> float | None:
        return max((p[0] for p in self.points), default=None)


def _tail_is_standard(seq: WeightSequence, J: int) -> bool:
    if seq.kind == "standard_mn":
        return True
    if seq.kind == "bump":
        return J >= seq.params["last_modified"]
    return False


def kernel_bound_certificate(
    profile: KernelProfile,
    grid: Sequence[float],
    tail_tol: float = 0.01,
) -> KernelCertificate:
    """Certify the 7/8 - 9/8 kernel bounds on radii ``grid``."""
    seq = profile.source
    if seq is None:
        raise ValueError("certificate needs a profile built from a weight sequence")
    n, J = profile.n, profile.J
    ref = standard_mn(n)
    first_bad = next((j for j in range(J + 1) if seq(j) < ref(j)), None)

    def evaluate(r: float):
        t = r * r
        tail = normalized_tail(n, J, t)
        if tail >= tail_tol:
            return None, (r, tail)
        value = kernel_value(profile, t) * (1.0 - t) ** n
        return (r, t, value, value - float(LOWER_BOUND), tail), None

    results = _grid_map(evaluate, sorted(grid))
    return KernelCertificate(
        n=n,
        J=J,
        tail_tol=tail_tol,
        points=tuple(p for p, _ in results if p is not None),
        excluded=tuple(e for _, e in results if e is not None),
        dominated_up_to_J=first_bad is None,
        first_undominated=first_bad,
        tail_is_standard=_tail_is_standard(seq, J),
    )


@dataclass(frozen=True)
class CurvatureRow:
    r: float
    t: float
    F: float
    F_normalized: float
    K_T: float
    K_model: float
    psi: float
    residual_series: float
    residual_fd: float

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, c) for c in CSV_COLUMNS)


def curvature_grid(profile: KernelProfile, grid: Sequence[float], h: float = 1e-3) -> list[CurvatureRow]:
    """One row per radius; residual_fd is NaN where the stencil leaves the disk."""
    n = profile.n

    def row(r: float) -> CurvatureRow:
        t = r * r
        f = kernel_value(profile, t)
        k_t = curvature(profile, t)
        k_model = model_curvature(n, t)
        rhs = k_model - k_t
        try:
            res_fd = abs(radial_laplacian_fd(lambda s: psi(profile, n, s), t, h) - rhs)
        except ValueError:
            res_fd = math.nan
        return CurvatureRow(
            r=r,
            t=t,
            F=f,
            F_normalized=f * (1.0 - t) ** n,
            K_T=k_t,
            K_model=k_model,
            psi=psi(profile, n, t),
            residual_series=abs(_psi_laplacian_series(profile, n, t) - rhs),
            residual_fd=res_fd,
        )

    return _grid_map(row, sorted(grid))
