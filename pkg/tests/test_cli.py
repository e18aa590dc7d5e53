import json
import math
import subprocess
import sys
from fractions import Fraction

import pytest

from wshift.cli import main, parse_grid, ConfigError
from wshift.report import dumps, build_report, jsonable, strip_timestamp


def run(tmp_path, *argv, name="r.json"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def test_verify_lemmas_lists_every_system(tmp_path):
    code, rep = run(tmp_path, "verify-lemmas", "--nmax", "8")
    assert code == 0 and rep["passed"]
    x1 = {(e["n"], e["k"]) for e in rep["result"]["lemmas"] if e["kind"] == "x1"}
    x2 = {(e["n"], e["m"]) for e in rep["result"]["lemmas"] if e["kind"] == "x2"}
    assert x1 == {(n, k) for n in range(2, 9) for k in range(2, n + 1)}
    assert x2 == {(n, m) for n in range(2, 9) for m in range(2, 9)}
    assert all(rep["result"]["identities"].values())
    assert rep["schema"] == "wshift.report/1"


def test_ratio_bound_equality_case(tmp_path):
    code, rep = run(tmp_path, "ratio-bound", "--weights", "builtin:mn:3", "--n", "3", "--J", "500")
    assert code == 0
    assert rep["result"]["verdict"] == "no violation"
    assert rep["result"]["equality_everywhere"] is True


def test_ratio_bound_random_property(tmp_path):
    code, rep = run(tmp_path, "ratio-bound", "--weights", "builtin:mn:2", "--J", "5",
                    "--samples", "10", "--K", "20", "--seed", "3")
    assert code == 0
    prop = rep["result"]["random_property"]
    assert prop["violations"] == 0 and prop["worst_ratio_to_bound"] <= 1
    assert rep["inputs"]["seed"] == 3


def test_counterexample_command(tmp_path):
    csv_path = tmp_path / "grid.csv"
    code, rep = run(tmp_path, "counterexample", "--n", "2", "--imax", "3",
                    "--grid", "0:0.95:0.05", "--csv", str(csv_path))
    assert code == 0 and rep["passed"]
    body = rep["result"]["report"]
    assert body["violation_index"] == 1025
    assert body["violation_ratio"] == "2052/1027"
    assert body["violation_bound"] == "1026/1027"
    assert body["N"] == {"2": 1024, "3": 6144}
    assert rep["inputs"]["tolerances"]["tail_tol"] == 0.01
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "r,t,F,F_normalized,K_T,K_model,psi,residual_series,residual_fd"
    assert len(lines) == 21


def test_certificate_failure_exit_code(tmp_path):
    code, rep = run(tmp_path, "hypercheck", "--weights", "builtin:bump:2:2")
    assert code == 1 and not rep["passed"]
    assert rep["result"]["violation"] == [1, 1026, "-1025/1027"]


def test_explicit_inline_weights(tmp_path):
    code, rep = run(tmp_path, "hypercheck", "--weights", "explicit:1,1/2", "--n", "2")
    assert code == 0 and rep["result"]["verdict"] == "holds_up_to_J"
    assert rep["inputs"]["weights"]["values"] == ["1", "1/2"]


def test_weight_file(tmp_path):
    path = tmp_path / "w.json"
    path.write_text(json.dumps({"kind": "standard_mn", "parameters": {"n": 2}}))
    code, rep = run(tmp_path, "max-order", "--weights", str(path), "--J", "40")
    assert code == 0 and rep["result"]["max_order"] == 2


def test_defect_command(tmp_path):
    code, rep = run(tmp_path, "defect", "--weights", "builtin:mn:2", "--k", "1", "--i", "3")
    assert code == 0 and rep["result"]["value"] == "1/4"
    code, rep = run(tmp_path, "defect", "--weights", "builtin:mn:1", "--k", "2", "--J", "5",
                    name="b.json")
    assert code == 1 and rep["result"]["first_negative"] == {"i": 1, "value": "-1"}


@pytest.mark.parametrize("command", ["kernel-bounds", "curvature", "psi"])
def test_grid_commands(tmp_path, command):
    code, rep = run(tmp_path, command, "--weights", "builtin:mn:2", "--grid", "0:0.9:0.1")
    assert code == 0 and rep["passed"]
    assert rep["inputs"]["grid"][-1] == 0.9


def test_shields_and_trace_demo(tmp_path):
    code, rep = run(tmp_path, "shields", "--weights", "builtin:mn:1", "--against", "builtin:mn:2",
                    "--J", "200")
    ev = rep["result"]["evidence"]
    assert code == 0 and ev["trend"] == "monotone-divergent"
    assert ev["spread"] == pytest.approx(math.log(202) - math.log(2), rel=1e-12)
    code, rep = run(tmp_path, "trace-demo", name="t.json")
    assert code == 0
    assert rep["result"]["similar"] is False and rep["result"]["traces_equal"] is True
    assert [p["evidence"]["trend"] for p in rep["result"]["pairs"]] == ["monotone-divergent"] * 2


def test_config_file_and_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"weights": "builtin:mn:2", "J": 5}))
    code, rep = run(tmp_path, "hypercheck", "--config", str(cfg))
    assert code == 0 and rep["inputs"]["J"] == 5
    code, rep = run(tmp_path, "hypercheck", "--config", str(cfg), "--J", "7", name="b.json")
    assert rep["inputs"]["J"] == 7


@pytest.mark.parametrize("argv,expected", [
    (["hypercheck", "--weights", "builtin:mn:2", "--J", "0"], 2),
    (["hypercheck", "--weights", "builtin:nope:2"], 2),
    (["hypercheck"], 2),
    (["kernel-bounds", "--weights", "builtin:mn:2", "--grid", "0:1:0.5"], 2),
    (["kernel-bounds", "--weights", "builtin:mn:2", "--tail-tol", "-1"], 2),
    (["hypercheck", "--weights", "explicit:1,0", "--n", "2"], 2),
    (["hypercheck", "--weights", "/does/not/exist.json"], 3),
])
def test_error_exit_codes(tmp_path, argv, expected):
    assert main([*argv, "--out", str(tmp_path / "r.json")]) == expected


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["hypercheck", "--config", str(bad)]) == 2
    bad.write_text(json.dumps({"bogus": 1}))
    assert main(["hypercheck", "--config", str(bad)]) == 2
    assert main(["hypercheck", "--config", str(tmp_path / "missing.json")]) == 3
    assert main(["hypercheck", "--weights", "builtin:mn:2", "--out",
                 str(tmp_path / "no" / "dir" / "r.json")]) == 3


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as err:
        main(["no-such-command"])
    assert err.value.code == 2


@pytest.mark.parametrize("argv", [
    ["counterexample", "--n", "2", "--imax", "2"],
    ["ratio-bound", "--weights", "builtin:mn:2", "--J", "5", "--samples", "5", "--K", "15"],
    ["curvature", "--weights", "builtin:bump:2:2", "--grid", "0:0.9:0.3"],
])
def test_reports_are_deterministic(tmp_path, argv):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main([*argv, "--out", str(a)])
    main([*argv, "--out", str(b)])
    assert strip_timestamp(a.read_text()) == strip_timestamp(b.read_text())
    strip = lambda p: "\n".join(l for l in p.read_text().splitlines() if "generated_at" not in l)
    assert strip(a) == strip(b)


def test_source_date_epoch_makes_files_identical(tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["trace-demo", "--out", str(a)])
    main(["trace-demo", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["generated_at"].startswith("2023-11-14")


def test_jsonable_conventions():
    assert jsonable(Fraction(3, 4)) == "3/4"
    assert jsonable(Fraction(6, 3)) == "2"
    assert jsonable(math.inf) == "inf" and jsonable(-math.inf) == "-inf"
    assert jsonable(math.nan) is None
    assert jsonable({1: (Fraction(1, 2), 2.5)}) == {"1": ["1/2", 2.5]}
    text = dumps(build_report("x", {"b": 1, "a": 2}, {}, True))
    assert text.index('"a"') < text.index('"b"')


def test_parse_grid_forms():
    assert parse_grid("0:0.2:0.1") == [0.0, 0.1, 0.2]
    assert parse_grid("0.5,0.25") == [0.5, 0.25]
    with pytest.raises(ConfigError):
        parse_grid("0:0.5")
    with pytest.raises(ConfigError):
        parse_grid("0.2,1.5")


def test_module_entry_point(tmp_path):
    out = tmp_path / "r.json"
    proc = subprocess.run([sys.executable, "-m", "wshift", "max-order", "--weights", "builtin:mn:3",
                           "--J", "50", "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["result"]["max_order"] == 3
