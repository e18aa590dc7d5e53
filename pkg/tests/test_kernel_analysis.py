import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from wshift.counterexample import bump_weights
from wshift.kernel_analysis import (
    PSI_SHIFT,
    curvature,
    curvature_grid,
    depth_for_tail,
    identity_residual,
    kernel_bound_certificate,
    kernel_derivatives,
    kernel_value,
    make_profile,
    model_curvature,
    normalized_tail,
    psi,
    psi_shifted,
    radial_laplacian_fd,
    radius_grid,
    tail_majorant,
    thread_count,
)
from wshift.weights import explicit, standard_mn

from oracles import mp_binomial_tail, mp_curvature


@pytest.fixture(scope="module")
def bump23():
    seq = bump_weights(2, 3)
    return make_profile(seq, seq.params["last_modified"] + 2, 2)


def test_kernel_value_examples():
    assert kernel_value(make_profile(standard_mn(3), 10), 0.0) == 1.0
    assert kernel_value(make_profile(standard_mn(1), 60), 0.5) == pytest.approx(2.0, abs=1e-15)
    assert kernel_value(make_profile(standard_mn(2), 200), 0.5) == pytest.approx(4.0, abs=1e-10)


def test_tail_examples():
    assert tail_majorant(1, 10, 0.5) == pytest.approx(2.0**-10, rel=1e-14)
    assert tail_majorant(4, 7, 0.0) == 0.0
    ref = float(mpmath.nsum(lambda j: (j + 1) * mpmath.mpf(0.9) ** j, [101, mpmath.inf]))
    assert tail_majorant(2, 100, 0.9) == pytest.approx(ref, rel=1e-12)


@given(st.integers(1, 6), st.integers(1, 400), st.floats(0.01, 0.97))
def test_tail_matches_mpmath(n, J, t):
    ref = mp_binomial_tail(n, J, t)
    if ref < 1e-40:  # below where the 50-digit difference is meaningful
        assert tail_majorant(n, J, t) < 1e-30
        return
    assert tail_majorant(n, J, t) == pytest.approx(float(ref), rel=1e-10)


@given(st.integers(1, 4), st.floats(0.0, 0.95), st.floats(1e-14, 1e-3))
def test_depth_for_tail_is_minimal(n, t, tol):
    J = depth_for_tail(n, t, tol)
    assert tail_majorant(n, J, t) < tol
    if J > 1:
        assert tail_majorant(n, J - 1, t) >= tol


def test_truncation_monotone_in_J():
    seq = bump_weights(2, 2)
    vals = [kernel_value(make_profile(seq, J, 2), 0.99) for J in (500, 1000, 1024, 1026, 1028, 2000)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_curvature_examples():
    assert curvature(make_profile(standard_mn(2), 50), 0.0) == -2.0
    assert curvature(make_profile(standard_mn(1), 50), 0.0) == -1.0
    assert curvature(make_profile(standard_mn(2), 400), 0.5) == pytest.approx(-8.0, abs=1e-8)


def test_model_curvature_examples():
    assert model_curvature(1, 0.0) == -1.0
    assert model_curvature(3, 0.5) == -12.0
    for t in (0.1, 0.4, 0.8):
        assert model_curvature(5, t) == pytest.approx(5 * model_curvature(1, t), rel=1e-15)


@pytest.mark.parametrize("t", [0.25, 0.6, 0.9])
def test_curvature_matches_mpmath_on_bumps(t):
    seq = bump_weights(2, 2)
    J = 1100
    prof = make_profile(seq, J, 2)
    ref = mp_curvature([1 / seq(j) for j in range(J + 1)], t)
    assert curvature(prof, t) == pytest.approx(float(ref), rel=1e-12)


def test_curvature_rejects_inadmissible_t():
    prof = make_profile(standard_mn(2), 20)
    with pytest.raises(ValueError):
        curvature(prof, 0.99, tail_tol=0.01)
    with pytest.raises(ValueError):
        curvature(prof, 1.0)


def test_psi_examples(bump23):
    prof = make_profile(standard_mn(2), depth_for_tail(2, 0.8, 1e-14))
    assert abs(psi(prof, 2, 0.8)) < 1e-12
    v = psi(bump23, 2, 0.25)
    assert math.log(7 / 8) < v <= 1e-15
    assert psi(bump23, 2, 0.0) == 0.0
    assert psi_shifted(bump23, 2, 0.25) == pytest.approx(v + PSI_SHIFT)
    assert psi_shifted(bump23, 2, 0.25) > 0


def test_identity_residual_examples(bump23):
    s, f = identity_residual(make_profile(standard_mn(2), 300), 2, 0.3, 1e-3)
    assert s < 1e-10 and f < 1e-5
    s, f = identity_residual(bump23, 2, 0.25, 1e-3)
    assert s < 1e-8 and f < 1e-3
    s, f = identity_residual(make_profile(standard_mn(3), 300), 3, 0.5, 1e-3)
    assert s < 1e-10 and f < 1e-5


@pytest.mark.parametrize("t", [0.1, 0.4, 0.7])
def test_fd_laplacian_on_test_functions(t):
    g = lambda s: -math.log1p(-s)
    exact = t / (1 - t) ** 2 + 1 / (1 - t)
    assert radial_laplacian_fd(g, t, 1e-3) == pytest.approx(exact, abs=1e-3)
    p = lambda s: 3 * s**3 - s + 2
    assert radial_laplacian_fd(p, t, 1e-3) == pytest.approx(t * 18 * t + 9 * t**2 - 1, abs=1e-3)


def test_fd_stencil_errors():
    with pytest.raises(ValueError):
        radial_laplacian_fd(lambda s: s, 0.999, 0.01)
    with pytest.raises(ValueError):
        radial_laplacian_fd(lambda s: s, 0.5, 0.0)


def test_derivative_tables_are_termwise():
    prof = make_profile(explicit(["1", "1/2", "1/4", "1/8"]), 3, 1)
    f0, f1, f2 = kernel_derivatives(prof, 0.5)
    # F = 1 + 2t + 4t^2 + 8t^3
    assert (f0, f1, f2) == (1 + 1 + 1 + 1, 2 + 4 + 6, 8 + 24)


def test_certificate_on_bumps(bump23):
    grid = radius_grid(0.0, 0.9, 0.1)
    cert = kernel_bound_certificate(bump23, grid, 0.01)
    assert cert.passed and not cert.excluded
    assert all(p[3] > 0 for p in cert.points)
    assert cert.points[0][2] == 1.0
    assert cert.max_value <= 1.0 + 1e-15


def test_certificate_excludes_points_with_large_tail():
    prof = make_profile(standard_mn(2), 200)
    cert = kernel_bound_certificate(prof, [0.0, 0.5, 0.999], 0.01)
    assert [e[0] for e in cert.excluded] == [0.999]
    assert cert.r_max == 0.5 and cert.passed


def test_certificate_detects_undominated_weights():
    prof = make_profile(explicit(["1", "1/4", "1/3"]), 2, 2)
    cert = kernel_bound_certificate(prof, [0.0, 0.3], 0.5)
    assert cert.first_undominated == 1 and not cert.upper_ok


def test_boundary_layer_certificate():
    """Near r = 1 the bumps are visible; a deeper truncation keeps every point."""
    seq = bump_weights(2, 3)
    grid = [0.99, 0.995, 0.999, 0.9995, 0.9999]
    shallow = kernel_bound_certificate(make_profile(seq, seq.params["last_modified"] + 2, 2), grid)
    assert shallow.excluded and shallow.lower_ok
    deep = kernel_bound_certificate(make_profile(seq, 110_000, 2), grid)
    assert not deep.excluded and deep.passed
    assert min(p[2] for p in deep.points) < 1 - 1e-4  # the bumps bite here


def test_curvature_grid_rows(bump23):
    rows = curvature_grid(bump23, [0.0, 0.5, 0.95], 1e-3)
    assert [r.r for r in rows] == [0.0, 0.5, 0.95]
    assert rows[0].F == 1.0 and rows[0].K_T == -2.0
    assert all(r.residual_series < 1e-8 for r in rows)


def test_thread_env_override(monkeypatch):
    monkeypatch.setenv("WSHIFT_THREADS", "3")
    assert thread_count() == 3
    prof = make_profile(standard_mn(2), 200)
    serial = [normalized_tail(2, 200, r * r) for r in radius_grid(0, 0.9, 0.1)]
    a = kernel_bound_certificate(prof, radius_grid(0, 0.9, 0.1))
    monkeypatch.setenv("WSHIFT_THREADS", "1")
    b = kernel_bound_certificate(prof, radius_grid(0, 0.9, 0.1))
    assert a == b and [p[4] for p in a.points] == serial


def test_radius_grid():
    assert radius_grid(0, 0.95, 0.05)[-1] == 0.95
    assert len(radius_grid(0, 0.95, 0.05)) == 20
    with pytest.raises(ValueError):
        radius_grid(0, 1.0, 0.5)
