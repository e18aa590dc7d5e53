"""``wshift`` command line.

Every command writes one JSON report (schema ``wshift.report/1``) to
``--out`` (default stdout) and, for the grid commands, an optional CSV with
the fixed column order ``r, t, F, F_normalized, K_T, K_model, psi,
residual_series, residual_fd``.  Options may also come from a JSON object
given with ``--config``; flags on the command line take precedence.

Exit status: 0 when every asserted certificate passes, 1 when one fails,
2 for an invalid configuration, 3 for an I/O error.

Weight specs accepted by ``--weights``::

    builtin:mn:N              standard M_N weights 1/C(N+j-1, j)
    builtin:bump:N:IMAX       bump weights on M_N with tents 2..IMAX
    explicit:1,1/2,1/3        an exact finite list
    path/to/weights.json      a ``wshift.weights/1`` file
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .counterexample import DEFAULT_GRID, run_counterexample
from .exact_arith import (
    build_lemma_system,
    closed_form_solution,
    identity_end,
    identity_first,
    identity_second,
    solve_exact,
    vanishing_coefficient,
    verify_lemma,
)
from .hypercontraction import (
    defect_diagonal,
    first_negative_defect,
    is_n_hypercontractive,
    max_order_bound,
    random_defect_nonnegative_ratios,
    ratio_bound,
    ratio_bound_check,
    reversed_defect,
)
from .kernel_analysis import (
    CSV_COLUMNS,
    PSI_SHIFT,
    curvature_grid,
    depth_for_tail,
    kernel_bound_certificate,
    make_profile,
    normalized_tail,
    radius_grid,
)
from .report import build_report, dumps, grid_csv
from .similarity import (
    DEFAULT_DIVERGENCE_THRESHOLD,
    shields_report,
    shift_similarity_demo,
    trace_curvature_direct_sum,
)
from .weights import WeightSequence, explicit, from_dict, ratios_from_values, standard_mn, to_dict

EXIT_OK, EXIT_CERT, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3
DEFAULT_SCAN_DEPTH = 100  # J for closed-form weights when nothing else fixes it


class ConfigError(ValueError):
    """Invalid run configuration (exit status 2)."""


# built-in defaults per option; None means "derive from the other inputs"
DEFAULTS = {
    "weights": None,
    "against": None,
    "n": None,
    "J": None,
    "grid": None,
    "tail_tol": 0.01,
    "residual_tol": 1e-8,
    "fd_tol": 1e-3,
    "fd_t_max": 0.8,
    "h": 1e-3,
    "divergence_threshold": DEFAULT_DIVERGENCE_THRESHOLD,
    "seed": 0,
    "out": "-",
    "csv": None,
    "nmax": 8,
    "mmax": None,
    "identity_nmax": 12,
    "identity_mmax": 40,
    "reversed_nmax": 6,
    "reversed_mmax": 200,
    "k": None,
    "i": None,
    "samples": 0,
    "K": 60,
    "a": "1,3",
    "b": "2,2",
    "t_values": "0:0.9:0.1",
    "imax": None,
    "slack": 0,
}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved options for one command."""

    command: str
    options: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.options[name]
        except KeyError:
            raise AttributeError(name) from None

    def validate(self) -> None:
        opts = self.options
        if opts.get("J") is not None and opts["J"] < 1:
            raise ConfigError(f"J must be >= 1, got {opts['J']}")
        if opts.get("n") is not None and opts["n"] < 1:
            raise ConfigError(f"n must be >= 1, got {opts['n']}")
        for key in ("tail_tol", "residual_tol", "fd_tol", "h", "divergence_threshold"):
            if key in opts and not opts[key] > 0:
                raise ConfigError(f"{key} must be > 0, got {opts[key]}")


# ---------------------------------------------------------------- parsing


def parse_grid(spec) -> list[float]:
    """``"start:stop:step"`` (stop included) or a comma list of radii."""
    if isinstance(spec, (list, tuple)):
        radii = [float(r) for r in spec]
    elif ":" in str(spec):
        parts = str(spec).split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid spec {spec!r} is not start:stop:step")
        try:
            start, stop, step = (float(p) for p in parts)
            radii = radius_grid(start, stop, step)
        except ValueError as exc:
            raise ConfigError(f"grid spec {spec!r}: {exc}") from None
    else:
        try:
            radii = [float(r) for r in str(spec).split(",") if r.strip()]
        except ValueError:
            raise ConfigError(f"grid spec {spec!r} is not a list of numbers") from None
    if not radii:
        raise ConfigError("grid is empty")
    for r in radii:
        if not 0.0 <= r < 1.0:
            raise ConfigError(f"grid radius {r} outside [0, 1)")
    return radii


def parse_weights(spec: str) -> WeightSequence:
    if spec is None:
        raise ConfigError("--weights is required for this command")
    spec = str(spec)
    try:
        if spec.startswith("builtin:"):
            parts = spec.split(":")[1:]
            if parts[0] == "mn" and len(parts) == 2:
                return standard_mn(int(parts[1]))
            if parts[0] == "bump" and len(parts) == 3:
                from .counterexample import bump_weights

                return bump_weights(int(parts[1]), int(parts[2]))
            raise ConfigError(f"unknown builtin weight spec {spec!r}")
        if spec.startswith("explicit:"):
            seq = explicit(spec[len("explicit:"):].split(","), source="inline")
            seq.values(int(seq.max_reliable_index) - 1)
            return seq
    except ConfigError:
        raise
    except (ValueError, ArithmeticError, IndexError) as exc:
        raise ConfigError(f"weight spec {spec!r}: {exc}") from None
    path = Path(spec)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read weight file {spec}: {exc.strerror or exc}") from None
    try:
        return from_dict(json.loads(text), source=str(path))
    except (ValueError, KeyError, TypeError, ArithmeticError) as exc:
        raise ConfigError(f"weight file {spec}: {exc}") from None


def parse_orders(spec) -> list[Fraction]:
    items = spec if isinstance(spec, (list, tuple)) else str(spec).split(",")
    try:
        return [Fraction(str(x).strip()) for x in items]
    except ValueError:
        raise ConfigError(f"order list {spec!r} is not a list of numbers") from None


def _resolve_n(cfg: RunConfig, seq: WeightSequence) -> int:
    if cfg.n is not None:
        return cfg.n
    if "n" in seq.params:
        return seq.params["n"]
    raise ConfigError("--n is required for explicit weights")


def _resolve_J(cfg: RunConfig, seq: WeightSequence, n: int, radii=None) -> int:
    if cfg.J is not None:
        J = cfg.J
    elif seq.kind == "explicit":
        J = int(seq.max_reliable_index) - 1
    elif seq.kind == "bump":
        J = seq.params["last_modified"] + 2
    elif radii:
        # deep enough that the normalized tail is below 1e-12 on the whole grid
        J = max(1, depth_for_tail(n, max(radii) ** 2, 1e-12))
    else:
        J = DEFAULT_SCAN_DEPTH
    if J < 1:
        raise ConfigError(f"J must be >= 1, got {J}")
    if J >= seq.max_reliable_index:
        raise ConfigError(f"J = {J} exceeds the {int(seq.max_reliable_index)} given weights")
    return J


def _weights_input(seq: WeightSequence) -> dict:
    return to_dict(seq)


# ---------------------------------------------------------------- commands


def cmd_verify_lemmas(cfg: RunConfig):
    nmax = cfg.nmax
    mmax = cfg.mmax if cfg.mmax is not None else nmax
    if nmax < 2 or mmax < 2:
        raise ConfigError("nmax and mmax must be >= 2")
    systems = []
    for n in range(2, nmax + 1):
        for k in range(2, n + 1):
            systems.append(("x1", n, k))
        for m in range(2, mmax + 1):
            systems.append(("x2", n, m))
    lemmas = []
    for kind, n, p in systems:
        system = build_lemma_system(kind, n, p)
        ok, residual = verify_lemma(system)
        agrees = solve_exact(system.matrix, system.rhs) == closed_form_solution(system)
        entry = {"kind": kind, "n": n, "k" if kind == "x1" else "m": p,
                 "verified": ok, "residual_zero": all(r == 0 for r in residual),
                 "solve_agrees": agrees}
        lemmas.append(entry)

    inm, imm = cfg.identity_nmax, cfg.identity_mmax
    cnm, cmm = cfg.reversed_nmax, cfg.reversed_mmax
    first_ok = all(identity_first(n, m) == 0 and identity_second(n, m) == 0
                   for n in range(2, inm + 1) for m in range(2, imm + 1))
    end_ok = all(identity_end(n, k) == (0, 0)
                 for n in range(2, inm + 1) for k in range(n, n + imm + 1))
    vanish_ok = all(vanishing_coefficient(n, m) == 0
                    for n in range(1, inm + 1) for m in range(1, cmm + 1))
    reversed_ok = all(reversed_defect(n, m) == (1 if m == 0 else 0)
                       for n in range(1, cnm + 1) for m in range(cmm + 1))
    identities = {
        "first_and_second": first_ok,
        "end": end_ok,
        "vanishing_coefficient": vanish_ok,
        "reversed_defect": reversed_ok,
    }
    passed = all(e["verified"] and e["residual_zero"] and e["solve_agrees"] for e in lemmas)
    passed = passed and all(identities.values())
    inputs = {"nmax": nmax, "mmax": mmax, "identity_nmax": inm, "identity_mmax": imm,
              "reversed_nmax": cnm, "reversed_mmax": cmm}
    return inputs, {"lemmas": lemmas, "identities": identities}, passed, None


def cmd_hypercheck(cfg: RunConfig):
    seq = parse_weights(cfg.weights)
    n = _resolve_n(cfg, seq)
    J = _resolve_J(cfg, seq, n)
    rep = is_n_hypercontractive(seq, n, J)
    result = {"verdict": rep.verdict, "violation": rep.violation}
    return {"weights": _weights_input(seq), "n": n, "J": J}, result, rep.holds, None


def cmd_ratio_bound(cfg: RunConfig):
    seq = parse_weights(cfg.weights)
    n = _resolve_n(cfg, seq)
    J = _resolve_J(cfg, seq, n)
    j = ratio_bound_check(seq, n, J)
    lam = seq.ratios()
    equality = all(lam(i) == ratio_bound(n, i) for i in range(J))
    if j is None:
        result = {"verdict": "no violation", "index": None, "equality_everywhere": equality}
    else:
        result = {"verdict": "violation", "index": j, "lambda": lam(j),
                  "bound": ratio_bound(n, j), "equality_everywhere": False}
    passed = j is None
    inputs = {"weights": _weights_input(seq), "n": n, "J": J}
    if cfg.samples:
        rng = random.Random(cfg.seed)
        worst, violations = Fraction(0), 0
        for _ in range(cfg.samples):
            lams = random_defect_nonnegative_ratios(n, cfg.K, rng)
            view = ratios_from_values(lams)
            if ratio_bound_check(view, n, cfg.K) is not None:
                violations += 1
            worst = max(worst, max(l / ratio_bound(n, i) for i, l in enumerate(lams)))
        result["random_property"] = {"samples": cfg.samples, "violations": violations,
                                     "worst_ratio_to_bound": float(worst)}
        inputs.update(samples=cfg.samples, K=cfg.K, seed=cfg.seed)
        passed = passed and violations == 0
    return inputs, result, passed, None


def cmd_max_order(cfg: RunConfig):
    seq = parse_weights(cfg.weights)
    n = cfg.n if cfg.n is not None else seq.params.get("n", 1)
    J = _resolve_J(cfg, seq, n)
    return {"weights": _weights_input(seq), "J": J}, {"max_order": max_order_bound(seq, J)}, True, None


def cmd_defect(cfg: RunConfig):
    seq = parse_weights(cfg.weights)
    if cfg.k is None or cfg.k < 1:
        raise ConfigError("--k (>= 1) is required for defect")
    inputs = {"weights": _weights_input(seq), "k": cfg.k}
    result, passed = {}, True
    if cfg.i is not None:
        if cfg.i < 0:
            raise ConfigError("--i must be >= 0")
        value = defect_diagonal(seq, cfg.k, cfg.i)
        inputs["i"] = cfg.i
        result["value"] = value
        passed = value >= 0
    if cfg.J is not None or cfg.i is None:
        J = _resolve_J(cfg, seq, seq.params.get("n", cfg.k))
        found = first_negative_defect(seq, cfg.k, J)
        inputs["J"] = J
        result["first_negative"] = None if found is None else {"i": found[0], "value": found[1]}
        passed = passed and found is None
    return inputs, result, passed, None


def _grid(cfg: RunConfig) -> list[float]:
    return parse_grid(cfg.grid if cfg.grid is not None else ":".join(map(str, DEFAULT_GRID)))


def _profile_inputs(cfg: RunConfig):
    seq = parse_weights(cfg.weights)
    n = _resolve_n(cfg, seq)
    radii = _grid(cfg)
    J = _resolve_J(cfg, seq, n, radii)
    inputs = {"weights": _weights_input(seq), "n": n, "J": J, "grid": radii}
    return seq, n, J, radii, inputs


def cmd_kernel_bounds(cfg: RunConfig):
    seq, n, J, radii, inputs = _profile_inputs(cfg)
    cert = kernel_bound_certificate(make_profile(seq, J, n), radii, cfg.tail_tol)
    inputs["tail_tol"] = cfg.tail_tol
    result = {"certificate": cert, "r_max": cert.r_max, "lower_ok": cert.lower_ok,
              "upper_ok": cert.upper_ok, "max_value": cert.max_value}
    return inputs, result, cert.passed, None


def _curvature_rows(seq, n, J, radii, h):
    return curvature_grid(make_profile(seq, J, n), radii, h)


def cmd_curvature(cfg: RunConfig):
    seq, n, J, radii, inputs = _profile_inputs(cfg)
    rows = _curvature_rows(seq, n, J, radii, cfg.h)
    inputs.update(h=cfg.h, residual_tol=cfg.residual_tol, fd_tol=cfg.fd_tol, fd_t_max=cfg.fd_t_max)
    series_ok = all(r.residual_series < cfg.residual_tol for r in rows)
    fd_ok = all(r.residual_fd < cfg.fd_tol for r in rows if r.t <= cfg.fd_t_max)
    result = {
        "rows": [dict(zip(CSV_COLUMNS, r.as_tuple())) | {"tail": normalized_tail(n, J, r.t)}
                 for r in rows],
        "series_residual_ok": series_ok,
        "fd_residual_ok": fd_ok,
    }
    return inputs, result, series_ok and fd_ok, rows


def cmd_psi(cfg: RunConfig):
    seq, n, J, radii, inputs = _profile_inputs(cfg)
    rows = _curvature_rows(seq, n, J, radii, cfg.h)
    lo = math.log(7 / 8)
    # psi <= 0 holds exactly under domination; allow float rounding above 0
    in_range = [lo < r.psi <= 64 * sys.float_info.epsilon for r in rows]
    result = {
        "rows": [{"r": r.r, "t": r.t, "psi": r.psi, "psi_shifted": r.psi + PSI_SHIFT,
                  "in_range": ok} for r, ok in zip(rows, in_range)],
        "shift": PSI_SHIFT,
    }
    return inputs, result, all(in_range), rows


def _evidence(ev) -> dict:
    return {"J": ev.J, "max_log": ev.max_log, "min_log": ev.min_log, "spread": ev.spread,
            "log_c2": ev.log_c2, "log_c1": ev.log_c1, "trend": ev.trend,
            "peak_witnesses": ev.peak_witnesses, "threshold": ev.threshold}


def cmd_shields(cfg: RunConfig):
    seq = parse_weights(cfg.weights)
    n = _resolve_n(cfg, seq)
    ref = parse_weights(cfg.against) if cfg.against is not None else standard_mn(n)
    J = _resolve_J(cfg, seq, n)
    if seq.kind == "explicit" or ref.kind == "explicit":
        limit = min(seq.max_reliable_index, ref.max_reliable_index) - 2
        if J > limit:
            raise ConfigError(f"J = {J} exceeds the ratios available ({int(limit)})")
    ev = shields_report(seq.ratios(), ref.ratios(), J, cfg.divergence_threshold)
    inputs = {"weights": _weights_input(seq), "against": _weights_input(ref), "J": J,
              "divergence_threshold": cfg.divergence_threshold}
    rows = [(j, L) for j, L in enumerate(ev.log_prefix)]
    return inputs, {"evidence": _evidence(ev)}, True, (("j", "L"), rows)


def cmd_trace_demo(cfg: RunConfig):
    a, b = parse_orders(cfg.a), parse_orders(cfg.b)
    try:
        ts = parse_grid(cfg.t_values)
        verdict = shift_similarity_demo(a, b, cfg.J or 200, cfg.divergence_threshold)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    traces = []
    for t in ts:
        ta, tb = trace_curvature_direct_sum(a, t), trace_curvature_direct_sum(b, t)
        traces.append({"t": t, "trace_a": ta, "trace_b": tb,
                       "relative_difference": abs(ta - tb) / abs(tb)})
    traces_equal = all(x["relative_difference"] < 1e-12 for x in traces)
    sums_equal = sum(a) == sum(b)
    result = {
        "similar": verdict.similar,
        "traces": traces,
        "traces_equal": traces_equal,
        "pairs": [{"alpha": x, "beta": y, "evidence": _evidence(ev)} for x, y, ev in verdict.pairs],
        "unmatched": verdict.unmatched,
    }
    # the trace agrees exactly when the order sums agree, similar or not
    passed = traces_equal == sums_equal
    inputs = {"a": a, "b": b, "J": cfg.J or 200, "t_values": ts,
              "divergence_threshold": cfg.divergence_threshold}
    return inputs, result, passed, None


def cmd_counterexample(cfg: RunConfig):
    n = cfg.n if cfg.n is not None else 2
    if n < 2:
        raise ConfigError("counterexample needs n >= 2")
    radii = _grid(cfg)
    try:
        rep = run_counterexample(
            n=n, i_max=cfg.imax, grid=radii, tail_tol=cfg.tail_tol, h=cfg.h,
            series_tol=cfg.residual_tol, fd_tol=cfg.fd_tol, fd_t_max=cfg.fd_t_max,
            slack=cfg.slack, strict=False,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    inputs = {"n": n, "imax": rep.i_max, "J": rep.J, "slack": cfg.slack, "grid": radii,
              "tolerances": rep.tolerances}
    result = {
        "report": rep,
        "shields": _evidence(rep.shields),
        "checks": rep.checks,
        "failures": rep.failures,
    }
    rows = None
    if cfg.csv:
        from .counterexample import bump_weights

        rows = _curvature_rows(bump_weights(n, rep.i_max), n, rep.J, radii, cfg.h)
    return inputs, result, rep.passed, rows


COMMANDS = {
    "verify-lemmas": cmd_verify_lemmas,
    "hypercheck": cmd_hypercheck,
    "ratio-bound": cmd_ratio_bound,
    "max-order": cmd_max_order,
    "defect": cmd_defect,
    "kernel-bounds": cmd_kernel_bounds,
    "curvature": cmd_curvature,
    "psi": cmd_psi,
    "shields": cmd_shields,
    "trace-demo": cmd_trace_demo,
    "counterexample": cmd_counterexample,
}


# ---------------------------------------------------------------- argparse


def _add(p, *flags, **kw):
    p.add_argument(*flags, default=argparse.SUPPRESS, **kw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wshift", description="Weighted backward shift analyses.",
        formatter_class=argparse.RawDescriptionHelpFormatter, epilog=__doc__.split("\n\n")[-1],
    )
    parser.add_argument("--version", action="version", version=f"wshift {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    common = argparse.ArgumentParser(add_help=False)
    _add(common, "--config", help="JSON object of option defaults (flags win)")
    _add(common, "--out", help="report path, '-' for stdout (default)")
    _add(common, "--seed", type=int, help="seed for random sampling (default 0)")
    _add(common, "--csv", help="write the command's table (if any) as CSV to this path")

    weights = argparse.ArgumentParser(add_help=False)
    _add(weights, "--weights", help="weight spec: builtin:mn:N, builtin:bump:N:IMAX, explicit:..., or a JSON file")
    _add(weights, "--n", type=int, help="order n (default: taken from the weight spec)")
    _add(weights, "--J", type=int, help="truncation index")

    grid = argparse.ArgumentParser(add_help=False)
    _add(grid, "--grid", help="radii as start:stop:step or a comma list (default 0:0.95:0.05)")
    _add(grid, "--tail-tol", dest="tail_tol", type=float, help="max normalized tail (default 0.01)")
    _add(grid, "--h", type=float, help="finite-difference step (default 1e-3)")

    resid = argparse.ArgumentParser(add_help=False)
    _add(resid, "--residual-tol", dest="residual_tol", type=float, help="series residual tolerance (default 1e-8)")
    _add(resid, "--fd-tol", dest="fd_tol", type=float, help="finite-difference residual tolerance (default 1e-3)")
    _add(resid, "--fd-t-max", dest="fd_t_max", type=float, help="check the FD residual for t <= this (default 0.8)")

    p = sub.add_parser("verify-lemmas", parents=[common], help="exact lemma systems and identity suites")
    _add(p, "--nmax", type=int, help="largest n (default 8)")
    _add(p, "--mmax", type=int, help="largest m for the x2 systems (default nmax)")
    _add(p, "--identity-nmax", dest="identity_nmax", type=int)
    _add(p, "--identity-mmax", dest="identity_mmax", type=int)
    _add(p, "--reversed-nmax", dest="reversed_nmax", type=int)
    _add(p, "--reversed-mmax", dest="reversed_mmax", type=int)

    sub.add_parser("hypercheck", parents=[common, weights], help="truncated n-hypercontractivity")
    p = sub.add_parser("ratio-bound", parents=[common, weights], help="lambda_j <= (1+j)/(n+j) check")
    _add(p, "--samples", type=int, help="also test this many random defect-nonnegative sequences")
    _add(p, "--K", type=int, help="length of the random sequences (default 60)")
    sub.add_parser("max-order", parents=[common, weights], help="largest n allowed by the ratio bound")
    p = sub.add_parser("defect", parents=[common, weights], help="defect diagonal D_k(i)")
    _add(p, "--k", type=int, help="defect order")
    _add(p, "--i", type=int, help="single index to evaluate")

    sub.add_parser("kernel-bounds", parents=[common, weights, grid], help="7/8 - 9/8 kernel certificate")
    sub.add_parser("curvature", parents=[common, weights, grid, resid], help="curvature grid and identity residuals")
    sub.add_parser("psi", parents=[common, weights, grid], help="psi and psi + log(8/7) on a grid")

    p = sub.add_parser("shields", parents=[common, weights], help="Shields prefix log-ratio evidence")
    _add(p, "--against", help="reference weight spec (default builtin:mn:n)")
    _add(p, "--divergence-threshold", dest="divergence_threshold", type=float)

    p = sub.add_parser("trace-demo", parents=[common], help="direct-sum trace versus similarity")
    _add(p, "--a", help="orders of the first sum (default 1,3)")
    _add(p, "--b", help="orders of the second sum (default 2,2)")
    _add(p, "--J", type=int, help="Shields scan depth (default 200)")
    _add(p, "--t-values", dest="t_values", help="t values (default 0:0.9:0.1)")
    _add(p, "--divergence-threshold", dest="divergence_threshold", type=float)

    p = sub.add_parser("counterexample", parents=[common, grid, resid], help="the bump-weight counterexample")
    _add(p, "--n", type=int, help="order n (default 2)")
    _add(p, "--imax", type=int, help="number of bumps (default 3 for n = 2, else 2)")
    _add(p, "--slack", type=int, help="extra truncation depth past the last bump (default 0)")
    return parser


def load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror or exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path}: not valid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config {path}: expected a JSON object")
    data = {k.replace("-", "_"): v for k, v in data.items()}
    unknown = sorted(set(data) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"config {path}: unknown option(s) {', '.join(unknown)}")
    return data


def resolve(args: argparse.Namespace) -> RunConfig:
    ns = vars(args).copy()
    command = ns.pop("command")
    config = load_config(ns.pop("config")) if "config" in ns else {}
    options = {**DEFAULTS, **config, **ns}
    for key in ("n", "J", "nmax", "mmax", "k", "i", "samples", "K", "imax", "slack", "seed"):
        if options.get(key) is not None and not isinstance(options[key], int):
            raise ConfigError(f"{key} must be an integer, got {options[key]!r}")
    cfg = RunConfig(command, options)
    cfg.validate()
    return cfg


def _write(path: str | None, text: str) -> None:
    if path is None:
        return
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from None


def dispatch(cfg: RunConfig) -> int:
    """Run one command; write the report (and CSV); return the exit status."""
    inputs, result, passed, rows = COMMANDS[cfg.command](cfg)
    report = build_report(cfg.command, inputs, result, passed)
    _write(cfg.out, dumps(report))
    if cfg.csv and rows is not None:
        if isinstance(rows, tuple):
            columns, data = rows
        else:
            columns, data = CSV_COLUMNS, [r.as_tuple() for r in rows]
        _write(cfg.csv, grid_csv(columns, data))
    return EXIT_OK if passed else EXIT_CERT


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return dispatch(resolve(args))
    except ConfigError as exc:
        print(f"wshift: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"wshift: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
