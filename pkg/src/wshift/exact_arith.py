"""Exact rational arithmetic for the binomial identities behind the ratio bound.

Everything here works over :class:`fractions.Fraction`; nothing is ever
rounded.  Two families of banded linear systems are provided:

``x1(n, k)``
    size ``k - 1`` with ``2 <= k <= n``; lower triangular plus a unit
    superdiagonal, right-hand side ``(-1)^(r+1) C(n, r+1)``.
``x2(n, m)``
    size ``n + m - 1`` with ``n, m >= 2``; the same band extended below row
    ``n - 1`` with a zero right-hand side.

Their closed-form solutions are entrywise negative, which is what makes the
inductive ratio bound go through.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "Rational",
    "LemmaSystem",
    "binomial",
    "identity_first",
    "identity_second",
    "identity_end",
    "vanishing_coefficient",
    "build_lemma_system",
    "closed_form_solution",
    "verify_lemma",
    "solve_exact",
]

Rational = Fraction


def binomial(n: int, k: int) -> int:
    """C(n, k) for integer ``n >= 0``; zero outside ``0 <= k <= n``."""
    if n < 0:
        raise ValueError(f"binomial upper argument must be >= 0, got {n}")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def identity_first(n: int, m: int) -> Fraction:
    """sum_{j=0}^{m} (-1)^j C(n,j) C(n+m-2-j, m-j); vanishes for n, m >= 2."""
    _require(n >= 2 and m >= 2, f"identity_first needs n, m >= 2, got n={n}, m={m}")
    return Fraction(sum((-1) ** j * binomial(n, j) * binomial(n + m - 2 - j, m - j)
                        for j in range(m + 1)))


def identity_second(n: int, m: int) -> Fraction:
    """sum_{j=0}^{m-1} (-1)^j (m-j) C(n,j) C(n+m-2-j, m-j); vanishes for n, m >= 2."""
    _require(n >= 2 and m >= 2, f"identity_second needs n, m >= 2, got n={n}, m={m}")
    return Fraction(sum((-1) ** j * (m - j) * binomial(n, j) * binomial(n + m - 2 - j, m - j)
                        for j in range(m)))


def identity_end(n: int, k: int) -> tuple[Fraction, Fraction]:
    """Both tail sums over ``j = 0..n`` used for the x2 system; both vanish for k >= n."""
    _require(n >= 2 and k >= n, f"identity_end needs n >= 2 and k >= n, got n={n}, k={k}")
    first = second = 0
    for j in range(n + 1):
        term = (-1) ** j * binomial(n, j) * binomial(n + k - 2 - j, k - j)
        first += term
        second += (k - j) * term
    return Fraction(first), Fraction(second)


def vanishing_coefficient(n: int, m: int) -> Fraction:
    """Coefficient of x^m in (1-x)^n (1-x)^(-n): 1 at m = 0, else 0."""
    _require(n >= 1 and m >= 0, f"vanishing_coefficient needs n >= 1, m >= 0, got n={n}, m={m}")
    return Fraction(sum((-1) ** j * binomial(n, j) * binomial(n + m - j - 1, m - j)
                        for j in range(min(n, m) + 1)))


@dataclass(frozen=True)
class LemmaSystem:
    """An exact square system ``matrix @ x = rhs``.

    ``kind`` is ``"x1"`` (parameter ``p`` is k) or ``"x2"`` (``p`` is m).
    """

    kind: str
    n: int
    p: int
    matrix: tuple[tuple[Fraction, ...], ...]
    rhs: tuple[Fraction, ...]

    @property
    def size(self) -> int:
        return len(self.rhs)


def _band_entry(n: int, row: int, col: int) -> int:
    # rows/cols 1-based; entry (-1)^d C(n, d) with d = row - col + 1
    d = row - col + 1
    if d < 0:
        return 0
    return (-1) ** d * binomial(n, d)


def _check_kind(kind: str, n: int, p: int) -> None:
    if kind == "x1":
        _require(2 <= p <= n, f"x1 system needs 2 <= k <= n, got n={n}, k={p}")
    elif kind == "x2":
        _require(n >= 2 and p >= 2, f"x2 system needs n, m >= 2, got n={n}, m={p}")
    else:
        raise ValueError(f"unknown lemma kind {kind!r}; expected 'x1' or 'x2'")


def build_lemma_system(kind: str, n: int, p: int) -> LemmaSystem:
    """Build the ``x1(n, k)`` or ``x2(n, m)`` system exactly.

    Examples
    --------
    >>> s = build_lemma_system("x1", 3, 3)
    >>> [[int(v) for v in row] for row in s.matrix], [int(v) for v in s.rhs]
    ([[-3, 1], [3, -3]], [3, -1])
    """
    _check_kind(kind, n, p)
    size = p - 1 if kind == "x1" else n + p - 1
    matrix = tuple(
        tuple(Fraction(_band_entry(n, r, c)) for c in range(1, size + 1))
        for r in range(1, size + 1)
    )
    # x1 rows all lie above the band cutoff; x2 rows from n onward are homogeneous
    rhs = tuple(
        Fraction((-1) ** (r + 1) * binomial(n, r + 1)) if kind == "x1" or r <= n - 1
        else Fraction(0)
        for r in range(1, size + 1)
    )
    return LemmaSystem(kind, n, p, matrix, rhs)


def closed_form_solution(system: LemmaSystem) -> tuple[Fraction, ...]:
    """x_j = -C(n+j-2, j) (D-j)/D with D = k for x1 and D = n+m for x2."""
    n = system.n
    denom = system.p if system.kind == "x1" else n + system.p
    return tuple(
        -Fraction(binomial(n + j - 2, j) * (denom - j), denom)
        for j in range(1, system.size + 1)
    )


def verify_lemma(system: LemmaSystem) -> tuple[bool, tuple[Fraction, ...]]:
    """Return ``(ok, residual)`` where residual = matrix @ closed_form - rhs."""
    x = closed_form_solution(system)
    residual = tuple(
        sum((a * xi for a, xi in zip(row, x)), Fraction(0)) - b
        for row, b in zip(system.matrix, system.rhs)
    )
    return all(r == 0 for r in residual), residual


def solve_exact(matrix, rhs) -> tuple[Fraction, ...]:
    """Solve a nonsingular square system by rational Gaussian elimination."""
    size = len(rhs)
    a = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if a[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular system")
        a[col], a[pivot] = a[pivot], a[col]
        for r in range(col + 1, size):
            f = a[r][col] / a[col][col]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    x = [Fraction(0)] * size
    for r in reversed(range(size)):
        s = a[r][size] - sum((a[r][c] * x[c] for c in range(r + 1, size)), Fraction(0))
        x[r] = s / a[r][r]
    return tuple(x)
