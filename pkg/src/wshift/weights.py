"""Weight sequences ``w_j`` defining the weighted Hardy-type space H^2_w.

A :class:`WeightSequence` is a lazily evaluated, immutable map ``j -> w_j``.
Closed-form kinds (``standard_mn``, ``bump``) are exact and unbounded;
explicit lists are exact (decimal inputs are read as exact decimals) and
carry their length as ``max_reliable_index``, the exclusive upper bound on
evaluable indices.  Every evaluation checks ``w_j > 0``.

Weight spec file format (JSON)::

    {"schema": "wshift.weights/1", "kind": "standard_mn", "parameters": {"n": 3}}
    {"schema": "wshift.weights/1", "kind": "bump", "parameters": {"n": 2, "i_max": 3}}
    {"schema": "wshift.weights/1", "kind": "explicit", "values": ["1", "1/2", "1/3"]}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .exact_arith import binomial

__all__ = [
    "WEIGHTS_SCHEMA",
    "NonPositiveWeightError",
    "WeightSequence",
    "RatioView",
    "ValidationReport",
    "standard_mn",
    "explicit",
    "ratio",
    "ratios_from_values",
    "validate",
    "to_dict",
    "from_dict",
    "save_spec",
    "load_spec",
    "parse_rational",
]

WEIGHTS_SCHEMA = "wshift.weights/1"


class NonPositiveWeightError(ValueError):
    """A weight evaluated to zero or a negative value."""


def parse_rational(value) -> Fraction:
    """Exact conversion of ``"p/q"``, decimal strings, ints and floats."""
    if isinstance(value, bool):
        raise TypeError("booleans are not weights")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        # the decimal literal, not the binary expansion
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as a rational")


@dataclass(frozen=True)
class WeightSequence:
    kind: str
    params: dict
    evaluator: Callable[[int], Fraction] = field(repr=False, compare=False)
    max_reliable_index: float = math.inf
    source: str | None = None

    def __call__(self, j: int) -> Fraction:
        if j < 0 or j >= self.max_reliable_index:
            raise IndexError(
                f"weight index {j} outside reliable range [0, {self.max_reliable_index})"
            )
        w = self.evaluator(j)
        if w <= 0:
            raise NonPositiveWeightError(f"w_{j} = {w} is not positive")
        return w

    def values(self, J: int) -> list[Fraction]:
        """``[w_0, ..., w_J]``."""
        return [self(j) for j in range(J + 1)]

    def ratios(self) -> "RatioView":
        return RatioView(lambda j: self(j + 1) / self(j), self.max_reliable_index - 1, source=self)


@dataclass(frozen=True)
class RatioView:
    """``j -> lambda_j = w_{j+1} / w_j``; ``limit`` is the exclusive index bound."""

    func: Callable[[int], Fraction | float] = field(repr=False, compare=False)
    limit: float = math.inf
    source: WeightSequence | None = None

    def __call__(self, j: int):
        if j < 0 or j >= self.limit:
            raise IndexError(f"ratio index {j} outside reliable range [0, {self.limit})")
        return self.func(j)

    def table(self, count: int) -> list:
        """``[lambda_0, ..., lambda_{count-1}]``."""
        return [self(j) for j in range(count)]

    def shift_weights(self, count: int) -> list[float]:
        """Weights sqrt(lambda_j) of the unitarily equivalent weighted shift."""
        return [math.sqrt(v) for v in self.table(count)]


def ratios_from_values(values: Sequence) -> RatioView:
    """A ratio view over a finite table of lambda values."""
    vals = tuple(values)
    return RatioView(vals.__getitem__, len(vals))


def standard_mn(n: int) -> WeightSequence:
    """Weights of M_n: ``w_j = 1 / C(n+j-1, j)``; n = 1 is the Hardy space."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"standard_mn needs an integer n >= 1, got {n!r}")

    @lru_cache(maxsize=None)
    def w(j: int) -> Fraction:
        return Fraction(1, binomial(n + j - 1, j))

    return WeightSequence("standard_mn", {"n": n}, w)


def explicit(values: Iterable, source: str | None = None) -> WeightSequence:
    vals = tuple(parse_rational(v) for v in values)
    if not vals:
        raise ValueError("explicit weight list is empty")
    return WeightSequence("explicit", {}, vals.__getitem__, len(vals), source=source)


def ratio(seq: WeightSequence, j: int):
    return seq(j + 1) / seq(j)


@dataclass(frozen=True)
class ValidationReport:
    """Truncated evidence for the analytic weight hypotheses.

    ``root`` is ``w_J^(1/J)``, a sample of the quantity whose liminf should
    be 1; ``max_ratio`` bounds ``lambda_0..lambda_{J-1}``.  Neither proves
    the asymptotic hypothesis.
    """

    J: int
    positive: bool
    min_ratio: Fraction | None
    max_ratio: Fraction | None
    root: float | None


def _log(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def validate(seq: WeightSequence, J: int) -> ValidationReport:
    ws = seq.values(J)  # raises NonPositiveWeightError on the first bad entry
    lam = [b / a for a, b in zip(ws, ws[1:])]
    root = math.exp(_log(ws[J]) / J) if J > 0 else None
    return ValidationReport(
        J=J,
        positive=True,
        min_ratio=min(lam) if lam else None,
        max_ratio=max(lam) if lam else None,
        root=root,
    )


def to_dict(seq: WeightSequence) -> dict:
    if seq.kind == "standard_mn":
        return {"schema": WEIGHTS_SCHEMA, "kind": seq.kind, "parameters": {"n": seq.params["n"]}}
    if seq.kind == "bump":
        params = {"n": seq.params["n"], "i_max": seq.params["i_max"]}
        return {"schema": WEIGHTS_SCHEMA, "kind": seq.kind, "parameters": params}
    if seq.kind == "explicit":
        count = int(seq.max_reliable_index)
        return {
            "schema": WEIGHTS_SCHEMA,
            "kind": "explicit",
            "values": [_fmt(seq(j)) for j in range(count)],
        }
    raise ValueError(f"cannot serialize weight kind {seq.kind!r}")


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def from_dict(data: dict, source: str | None = None) -> WeightSequence:
    try:
        kind = data["kind"]
    except (KeyError, TypeError):
        raise ValueError("weight spec needs a 'kind' field") from None
    schema = data.get("schema", WEIGHTS_SCHEMA)
    if schema != WEIGHTS_SCHEMA:
        raise ValueError(f"unsupported weight schema {schema!r}")
    params = data.get("parameters", {})
    if kind == "standard_mn":
        return standard_mn(int(params["n"]))
    if kind == "bump":
        from .counterexample import bump_weights

        return bump_weights(int(params["n"]), int(params["i_max"]))
    if kind == "explicit":
        seq = explicit(data["values"], source=source)
        # file input is checked eagerly so a bad entry fails at load time
        seq.values(int(seq.max_reliable_index) - 1)
        return seq
    raise ValueError(f"unknown weight kind {kind!r}")


def save_spec(seq: WeightSequence, path) -> None:
    Path(path).write_text(json.dumps(to_dict(seq), indent=2, sort_keys=True) + "\n")


def load_spec(path) -> WeightSequence:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from None
    return from_dict(data, source=str(path))
