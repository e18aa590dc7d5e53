import math
from fractions import Fraction

import numpy as np
import pytest

from wshift.counterexample import (
    CounterexampleFailure,
    bump_factor,
    bump_weights,
    build_construction,
    capital_m,
    capital_n,
    deficit,
    run_counterexample,
)
from wshift.weights import standard_mn

from oracles import bump_polynomial


def test_capital_m_examples():
    assert capital_m(2) == (2, 16)
    assert capital_m(3) == (Fraction(40, 3), 48)
    assert capital_m(4) == (Fraction(148, 3), 128)


@pytest.mark.parametrize("i", range(2, 9))
def test_capital_m_is_the_sup(i):
    m, bound = capital_m(i)
    xs = np.linspace(0.0, 1.0, 20001)[:-1]
    vals = [bump_polynomial(i, x) for x in xs]
    assert max(vals) <= float(m) * (1 + 1e-12)
    assert bump_polynomial(i, 1 - 1e-9) == pytest.approx(float(m), rel=1e-6)
    assert m < bound


def test_capital_n_examples():
    assert capital_n(2, 2) == 1024
    assert capital_n(3, 2) == 6144
    assert capital_n(2, 3) == 3456


def test_bump_factors_and_domination():
    con = build_construction(2, 3)
    assert con.tent_symmetric()
    assert [bump_factor(1024 + l, con.N) for l in range(0, 5)] == [1, 1, 2, 1, 1]
    assert [bump_factor(6144 + l, con.N) for l in range(0, 7)] == [1, 1, 2, 3, 2, 1, 1]
    ref = standard_mn(2)
    assert all(con.weights(j) >= ref(j) for j in range(con.depth + 1))


def test_violation_ratio_is_exact():
    seq = bump_weights(2, 3)
    assert seq(1026) / seq(1025) == Fraction(2 * 1026, 1027)


def test_deficit_bound_dense():
    con = build_construction(2, 3)
    for i in (2, 3):
        worst = max(deficit(con, i, t) for t in np.linspace(0, 0.999999, 4001))
        assert worst < 2.0 ** -(i + 2)


@pytest.fixture(scope="module")
def report23():
    return run_counterexample(2, 3)


def test_pipeline_n2(report23):
    rep = report23
    assert rep.passed, rep.failures
    assert rep.N == {2: 1024, 3: 6144}
    assert rep.violation_index == 1025
    assert rep.violation_ratio == Fraction(2052, 1027)
    assert rep.violation_bound == Fraction(1026, 1027)
    assert rep.order_n_witness == (1026, -1)
    assert rep.max_order == 0
    assert rep.peaks[2][0] == 1025 and rep.peaks[3][0] == 6146
    assert rep.kernel.r_max == 0.95


def test_pipeline_n3():
    rep = run_counterexample(3)
    assert rep.passed, rep.failures
    assert rep.N == {2: 3456}


def test_pipeline_origin_only():
    rep = run_counterexample(2, 2, grid=[0.0])
    assert rep.passed
    assert rep.kernel.points[0][2] == 1.0


def test_strict_failure_carries_report():
    with pytest.raises(CounterexampleFailure) as err:
        run_counterexample(2, 2, grid=[0.0, 0.5], series_tol=1e-300)
    assert err.value.report.failures == ["series_residual"]


def test_bad_parameters():
    with pytest.raises(ValueError):
        bump_weights(1, 3)
    with pytest.raises(ValueError):
        capital_m(1)
