import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaussian_hcrb import (
    ConvergenceError,
    MinimizerConfig,
    ModelPoint,
    SubspaceFreeParams,
    gendyne_gap,
    h_value,
    hcrb_closed,
    minimize_h,
    optimal_gendyne,
    sld_crb,
    trace_norm_hermitian,
    z_matrix_single,
    z_matrix_two,
)
from gaussian_hcrb.hcrb import locally_unbiased_residuals, refine_z_opt, stationarity

squeeze = st.floats(0.0, 2.0)
free3 = st.lists(st.floats(-3, 3), min_size=3, max_size=3)
free15 = st.lists(st.floats(-3, 3), min_size=15, max_size=15)
E = np.e


# z_opt(r) frozen from an independent bisection on a finite-difference df/dz
Z_OPT_REF = {
    0.5: 0.6698880845,
    1.0: 0.8105246141,
    2.0: 0.9652968840,
}


def test_trace_norm_examples():
    assert trace_norm_hermitian(np.zeros((3, 3))) == 0.0
    im = np.array([[0, 0.25, 0], [-0.25, 0, 0], [0, 0, 0]])
    assert trace_norm_hermitian(1j * im) == pytest.approx(0.5)
    assert trace_norm_hermitian(np.diag([-2.0, 3.0])) == pytest.approx(5.0)
    with pytest.raises(ValueError):
        trace_norm_hermitian(np.array([[0, 1], [0, 0]]))


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
def test_trace_norm_of_antisymmetric_3x3(a, b, c):
    A = np.array([[0, a, b], [-a, 0, c], [-b, -c, 0]])
    assert trace_norm_hermitian(1j * A) == pytest.approx(2 * np.sqrt(a * a + b * b + c * c), abs=1e-12)


def test_z_single_examples():
    Z = z_matrix_single(0.5, [0, 0, 0])
    assert np.allclose(np.diag(Z).real, [E / 4, 1 / (4 * E), 0.5])
    assert Z[0, 1] == pytest.approx(0.25j)
    assert z_matrix_single(0.3, [0.2, 0, 0])[0, 0].real == pytest.approx(np.exp(0.6) / 4 + 0.04)


def test_z_two_at_origin():
    Z = z_matrix_two(0.0, np.zeros(15))
    assert Z[0, 0].real == pytest.approx(0.5)
    assert Z[2, 2].real == pytest.approx(0.5)
    # X1 and X2 carry their offsets on different basis vectors
    assert Z[0, 1] == pytest.approx(0.0)


@given(squeeze, free3)
def test_z_single_is_valid(r, fp):
    Z = z_matrix_single(r, fp)
    assert np.max(np.abs(Z - Z.conj().T)) < 1e-12
    assert np.linalg.eigvalsh(Z.real).min() > -1e-12
    assert np.all(np.diag(Z).real >= 0)


@given(squeeze, free15)
def test_z_two_is_valid(r, fp):
    Z = z_matrix_two(r, fp)
    assert np.max(np.abs(Z - Z.conj().T)) < 1e-12
    assert np.linalg.eigvalsh(Z.real).min() > -1e-10 * max(1, np.abs(Z).max())


@given(squeeze, st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_h_single_matches_closed_expression(r, beta, gamma, delta):
    got = h_value(z_matrix_single(r, [beta, gamma, delta]))
    want = (np.cosh(2 * r) + 1) / 2 + beta**2 + gamma**2 + delta**2 + 0.5 * np.sqrt(1 + 8 * beta**2 + 8 * gamma**2)
    assert got == pytest.approx(want, rel=1e-12)


@given(squeeze)
def test_h_single_at_origin_is_hcrb(r):
    assert h_value(z_matrix_single(r, [0, 0, 0])) == pytest.approx((np.cosh(2 * r) + 2) / 2, rel=1e-12)


def test_h_value_real_diagonal():
    assert h_value(np.diag([1.0, 2.0, 3.0])) == pytest.approx(6.0)


@given(squeeze, free3, free15)
def test_locally_unbiased_for_any_free_parameters(r, f3, f15):
    for model, fp in (("single", f3), ("two", f15)):
        first, second = locally_unbiased_residuals(ModelPoint(model, (0.3, -0.1, r)), fp)
        assert np.max(np.abs(first)) < 1e-12
        assert np.max(np.abs(second)) < 1e-10


def test_free_params_validation():
    with pytest.raises(ValueError):
        SubspaceFreeParams("single", [0, 0])
    with pytest.raises(ValueError):
        SubspaceFreeParams("two", [np.nan] * 15)
    with pytest.raises(ValueError):
        z_matrix_single(0.1, SubspaceFreeParams("two", np.zeros(15)))


def test_minimizer_config_validation():
    with pytest.raises(ValueError):
        MinimizerConfig(restarts=0)
    with pytest.raises(ValueError):
        MinimizerConfig(tol=0)


def test_minimize_h_single_r0():
    res = minimize_h(ModelPoint.single())
    assert res.value == pytest.approx(1.5, abs=1e-9)
    assert np.allclose(res.argmin.values, 0, atol=1e-5)


@pytest.mark.parametrize("r, want", [(0.0, 1.25), (0.5, 0.25 + np.exp(-1))])
def test_minimize_h_two(r, want):
    res = minimize_h(ModelPoint.two(r=r), MinimizerConfig(restarts=8))
    assert res.value == pytest.approx(want, abs=1e-8)
    assert res.converged_restarts >= 1


def test_minimize_h_is_seed_deterministic():
    cfg = MinimizerConfig(restarts=4, seed=7)
    a = minimize_h(ModelPoint.two(r=0.3), cfg)
    b = minimize_h(ModelPoint.two(r=0.3), cfg)
    assert a.value == b.value
    assert np.array_equal(a.argmin.values, b.argmin.values)


def test_minimize_h_reports_non_convergence():
    with pytest.raises(ConvergenceError):
        minimize_h(ModelPoint.two(r=0.3), MinimizerConfig(restarts=1, max_iter=1))


def test_hcrb_closed_examples():
    assert hcrb_closed(ModelPoint.single(r=1)) == pytest.approx(2.88109, abs=1e-5)
    assert hcrb_closed(ModelPoint.two(r=1)) == pytest.approx(0.385335, abs=1e-6)
    assert hcrb_closed(ModelPoint.single()) == pytest.approx(1.5)


@given(squeeze)
def test_single_mode_gap_is_half(r):
    p = ModelPoint.single(r=r)
    assert hcrb_closed(p) - sld_crb(p) == pytest.approx(0.5, abs=1e-12)


@given(squeeze)
def test_bound_chain(r):
    for model in ("single", "two"):
        p = ModelPoint(model, (0, 0, r))
        cs, ch = sld_crb(p), hcrb_closed(p)
        assert cs <= ch + 1e-12 <= 2 * cs + 2e-12


def test_gendyne_gap_examples():
    assert gendyne_gap(1.0, 0.0) == pytest.approx(0.5)
    assert 0 < gendyne_gap(1.0, 2.0) < 0.02


@given(st.floats(-4, 4), squeeze)
def test_gendyne_gap_positive(logz, r):
    assert gendyne_gap(np.exp(logz), r) > 0


def test_optimal_gendyne_at_zero():
    z, f = optimal_gendyne(0.0)
    assert z == pytest.approx(1.0, abs=1e-12)
    assert f == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("r", sorted(Z_OPT_REF))
def test_z_opt_frozen_values(r):
    z, f = optimal_gendyne(r)
    assert z == pytest.approx(Z_OPT_REF[r], abs=1e-7)
    assert abs(stationarity(z, r)) < 1e-10
    assert f == pytest.approx(gendyne_gap(z, r))


@given(st.floats(0.05, 3.0))
def test_z_opt_is_the_grid_minimum(r):
    z, f = optimal_gendyne(r)
    grid = np.exp(np.linspace(-5, 5, 4001))
    assert f <= min(gendyne_gap(g, r) for g in grid[::20]) + 1e-12
    assert z == pytest.approx(refine_z_opt(r, (z * 0.9, z * 1.1)), rel=1e-7)
