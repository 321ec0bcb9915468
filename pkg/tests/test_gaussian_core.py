import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaussian_hcrb import (
    GaussianState,
    GendyneMeasurement,
    ModelPoint,
    balanced_bs_symplectic,
    gendyne_distribution,
    single_mode_model_gaussian,
    squeezed_vacuum_cov,
    symplectic_form,
    two_mode_model_gaussian,
    validate_covariance,
)
from gaussian_hcrb.gaussian_core import (
    displacement_mean,
    symplectic_eigenvalues,
    two_mode_squeezed_cov,
)

squeeze = st.floats(0.0, 2.5)
coord = st.floats(-3.0, 3.0)


def test_symplectic_form_structure():
    om = symplectic_form(2)
    assert np.array_equal(om, -om.T)
    assert np.allclose(om @ om, -np.eye(4))
    assert om[0, 1] == 1 and om[2, 3] == 1 and om[0, 3] == 0


@pytest.mark.parametrize("d", [0, -1, 1.5])
def test_symplectic_form_rejects_bad_modes(d):
    with pytest.raises(ValueError):
        symplectic_form(d)


def test_validate_covariance_examples():
    vac = validate_covariance(np.eye(2))
    assert vac.is_valid and vac.is_pure
    assert not validate_covariance(np.diag([0.5, 0.5])).is_valid
    sq = validate_covariance(np.diag([np.e**2, np.e**-2]))
    assert sq.is_valid and sq.is_pure


def test_thermal_state_is_valid_but_mixed():
    rep = validate_covariance(3.0 * np.eye(2))
    assert rep.is_valid and not rep.is_pure
    assert rep.symplectic_eigenvalues == pytest.approx([3.0])


@pytest.mark.parametrize("cov", [np.eye(3), np.ones((2, 3))])
def test_validate_covariance_shape_errors(cov):
    with pytest.raises(ValueError):
        validate_covariance(cov)


@given(st.floats(0.2, 5.0), st.floats(0.2, 5.0), st.floats(-0.9, 0.9))
def test_single_mode_symplectic_eigenvalue_is_sqrt_det(a, b, c):
    cov = np.array([[a, c], [c, b]])
    if np.linalg.eigvalsh(cov).min() <= 0:
        return
    assert symplectic_eigenvalues(cov)[0] == pytest.approx(np.sqrt(np.linalg.det(cov)), rel=1e-10)


def test_two_mode_model_example():
    st2 = two_mode_model_gaussian(ModelPoint.two(1, -2, 0.3))
    assert np.allclose(st2.mean, [1, -2, -1, 2])
    assert np.allclose(st2.cov, np.diag(np.exp([0.6, -0.6, -0.6, 0.6])))
    vac = two_mode_model_gaussian(ModelPoint.two())
    assert np.allclose(vac.cov, np.eye(4)) and np.allclose(vac.mean, 0)


def test_displacement_mean_convention():
    assert np.allclose(displacement_mean(0.3 + 0.7j), np.sqrt(2) * np.array([0.3, 0.7]))


@given(coord, coord, squeeze)
def test_model_states_are_pure(t1, t2, r):
    assert single_mode_model_gaussian(ModelPoint.single(t1, t2, r)).is_pure
    assert two_mode_model_gaussian(ModelPoint.two(t1, t2, r)).is_pure


def test_gaussian_state_arrays_are_read_only():
    s = single_mode_model_gaussian(ModelPoint.single(0.1, 0.2, 0.3))
    with pytest.raises(ValueError):
        s.cov[0, 0] = 5.0
    assert s.modes == 1


def test_gaussian_state_rejects_unphysical():
    with pytest.raises(ValueError):
        GaussianState(np.zeros(2), np.diag([0.5, 0.5]))
    with pytest.raises(ValueError):
        GaussianState(np.zeros(3), np.eye(2))


def test_beam_splitter_is_symplectic_and_orthogonal():
    S = balanced_bs_symplectic()
    om = symplectic_form(2)
    assert np.allclose(S @ om @ S.T, om, atol=1e-14)
    assert np.allclose(S @ S.T, np.eye(4), atol=1e-14)


@given(squeeze)
def test_beam_splitter_factorises_two_mode_squeezing(r):
    S = balanced_bs_symplectic()
    out = S @ two_mode_squeezed_cov(r) @ S.T
    want = np.diag(np.exp([2 * r, -2 * r, -2 * r, 2 * r]))
    assert np.allclose(out, want, rtol=1e-12, atol=1e-12)


def test_heterodyne_on_vacuum():
    dist = gendyne_distribution(GaussianState(np.zeros(2), np.eye(2)), GendyneMeasurement.heterodyne())
    assert np.allclose(dist.sigma_cap, np.eye(2))


@given(squeeze, st.floats(0.05, 20.0))
def test_general_dyne_sigma(r, z):
    state = GaussianState(np.zeros(2), squeezed_vacuum_cov(r))
    dist = gendyne_distribution(state, GendyneMeasurement.squeezed(z))
    want = 0.5 * np.diag([np.exp(2 * r) + z, np.exp(-2 * r) + 1 / z])
    assert np.allclose(dist.sigma_cap, want, rtol=1e-13)


@given(squeeze)
def test_double_homodyne_precision_on_support(r):
    state = two_mode_model_gaussian(ModelPoint.two(0.4, -0.2, r))
    dist = gendyne_distribution(state, GendyneMeasurement.homodyne_limit(("p", "q")))
    e2 = np.exp(2 * r)
    # (sigma + sigma_m)^-1 on the support; Sigma is half of sigma + sigma_m
    assert np.allclose(dist.precision() / 2, np.diag([0, e2, e2, 0]), rtol=1e-12)
    assert dist.support == [1, 2]


@given(st.floats(1e-4, 1e-2))
def test_homodyne_limit_is_continuous(z):
    # p-homodyne is the z -> 0 limit of diag(1/z, z)
    r = 0.4
    state = GaussianState(np.zeros(2), squeezed_vacuum_cov(r))
    near = gendyne_distribution(state, GendyneMeasurement(np.diag([1 / z, z]))).precision()
    exact = gendyne_distribution(state, GendyneMeasurement.homodyne_limit(("p",))).precision()
    assert np.allclose(near, exact, atol=10 * z)


def test_measurement_validation():
    with pytest.raises(ValueError):
        GendyneMeasurement(2 * np.eye(2))  # mixed seed
    with pytest.raises(ValueError):
        GendyneMeasurement.squeezed(0.0)
    with pytest.raises(ValueError):
        GendyneMeasurement(np.eye(2), ("x",))
    with pytest.raises(ValueError):
        gendyne_distribution(
            GaussianState(np.zeros(2), np.eye(2)), GendyneMeasurement.heterodyne(2)
        )
