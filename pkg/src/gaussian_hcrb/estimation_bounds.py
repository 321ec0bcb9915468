"""Closed-form SLD quantities and classical Fisher information of Gaussian measurements.

The weight matrix of every scalar bound is the identity.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .gaussian_core import (
    GaussianDistribution,
    GaussianState,
    GendyneMeasurement,
    gendyne_distribution,
    squeezed_vacuum_cov,
    two_mode_model_gaussian,
)
from .model import Model, ModelPoint

__all__ = [
    "gaussian_fisher",
    "qfi_matrix",
    "sld_crb",
    "uhlmann_matrix",
    "quantumness",
    "gendyne_fisher_single",
    "gendyne_fisher_single_generic",
    "gendyne_precision_single",
    "heterodyne_precision",
    "gendyne_fisher_two",
    "double_homodyne_fisher_two",
    "double_homodyne_precision",
]


def gaussian_fisher(
    d_mean: Sequence[np.ndarray],
    dist: GaussianDistribution,
    d_sigma: Optional[Sequence[np.ndarray]] = None,
    *,
    tol: float = 1e-12,
) -> np.ndarray:
    """Fisher information of a multivariate Gaussian family.

    ``F_mn = dm_m^T S^-1 dm_n + 1/2 Tr[S^-1 dS_m S^-1 dS_n]`` where ``S^-1`` is
    the precision of ``dist`` (inverse on the support in homodyne limits).

    Args:
        d_mean: derivative of the mean vector for each parameter.
        dist: the outcome distribution at the evaluation point.
        d_sigma: derivative of ``sigma_cap`` for each parameter; ``None`` means
            the covariance does not depend on the parameters.
        tol: threshold below which a support eigenvalue counts as zero.

    Raises:
        ValueError: if the support block of ``sigma_cap`` is singular and a
            derivative has a component along its kernel (infinite information).
    """
    d_mean = [np.asarray(v, dtype=float) for v in d_mean]
    k = len(d_mean)
    n = dist.sigma_cap.shape[0]
    if d_sigma is None:
        d_sigma = [np.zeros((n, n))] * k
    d_sigma = [np.asarray(m, dtype=float) for m in d_sigma]
    if len(d_sigma) != k or any(v.shape != (n,) for v in d_mean) or any(
        m.shape != (n, n) for m in d_sigma
    ):
        raise ValueError("derivative shapes do not match the distribution")

    sup = dist.support
    block = dist.sigma_cap[np.ix_(sup, sup)]
    evals, evecs = np.linalg.eigh(block)
    null = evecs[:, evals <= tol * max(1.0, float(np.max(np.abs(evals), initial=0.0)))]
    if null.shape[1]:
        for v, m in zip(d_mean, d_sigma):
            if np.linalg.norm(null.T @ v[sup]) > tol or np.linalg.norm(
                null.T @ m[np.ix_(sup, sup)]
            ) > tol:
                raise ValueError(
                    "ill-posed homodyne limit: parameter derivatives have "
                    "components along zero-variance directions"
                )
    prec = np.zeros((n, n))
    good = evals > tol * max(1.0, float(np.max(np.abs(evals), initial=0.0)))
    vg = evecs[:, good]
    prec[np.ix_(sup, sup)] = (vg / evals[good]) @ vg.T

    fisher = np.empty((k, k))
    ps = [prec @ m for m in d_sigma]
    for a in range(k):
        for b in range(a, k):
            val = d_mean[a] @ prec @ d_mean[b] + 0.5 * np.trace(ps[a] @ ps[b])
            fisher[a, b] = fisher[b, a] = val
    return fisher


def qfi_matrix(point: ModelPoint) -> np.ndarray:
    """Quantum Fisher information matrix; independent of the displacement."""
    r = point.r
    if point.model is Model.SINGLE:
        return np.diag([4 * np.exp(-2 * r), 4 * np.exp(2 * r), 2.0])
    c = 4 * np.cosh(2 * r)
    return np.diag([c, c, 4.0])


def sld_crb(point: ModelPoint) -> float:
    """SLD Cramer-Rao bound ``Tr[Q^-1]``."""
    r = point.r
    if point.model is Model.SINGLE:
        return (1 + np.cosh(2 * r)) / 2
    return 0.25 + 1 / (2 * np.cosh(2 * r))


def uhlmann_matrix(point: ModelPoint) -> np.ndarray:
    """Uhlmann curvature; the same constant matrix for both models."""
    return np.array([[0.0, 4.0, 0.0], [-4.0, 0.0, 0.0], [0.0, 0.0, 0.0]])


def quantumness(Q: np.ndarray, D: np.ndarray) -> float:
    """Asymptotic incompatibility ``||i Q^-1 D||_inf``.

    The spectrum of ``i Q^-1 D`` is ``i`` times that of the real matrix
    ``Q^-1 D``, so only real arithmetic is needed.

    Raises:
        np.linalg.LinAlgError: if ``Q`` is singular.
    """
    Q = np.asarray(Q, dtype=float)
    if np.linalg.cond(Q) > 1e14:
        raise np.linalg.LinAlgError("QFI matrix is singular")
    ev = np.linalg.eigvals(np.linalg.solve(Q, np.asarray(D, dtype=float)))
    value = float(np.max(np.abs(ev)))
    return 0.0 if value < 1e-10 else value


def _check_z(z: float) -> None:
    if not z > 0:
        raise ValueError(f"general-dyne squeezing z must be positive, got {z}")


def gendyne_fisher_single(r: float, z: float) -> np.ndarray:
    """Fisher matrix of general-dyne ``diag(z, 1/z)`` on the single-mode model."""
    _check_z(z)
    e2 = np.exp(2 * r)
    return np.diag(
        [4 / (e2 + z), 4 / (1 / e2 + 1 / z), 2 * (e2**2 + z**2) / (e2 + z) ** 2]
    )


def _single_mode_derivatives(r: float):
    s2 = np.sqrt(2.0)
    d_mean = [np.array([s2, 0.0]), np.array([0.0, s2]), np.zeros(2)]
    # dSigma/dr with Sigma = (sigma + sigma_m)/2
    d_sigma = [np.zeros((2, 2)), np.zeros((2, 2)), np.diag([np.exp(2 * r), -np.exp(-2 * r)])]
    return d_mean, d_sigma


def gendyne_fisher_single_generic(r: float, z: float) -> np.ndarray:
    """Same quantity as :func:`gendyne_fisher_single`, through :func:`gaussian_fisher`."""
    _check_z(z)
    state = GaussianState(np.zeros(2), squeezed_vacuum_cov(r))
    dist = gendyne_distribution(state, GendyneMeasurement.squeezed(z))
    d_mean, d_sigma = _single_mode_derivatives(r)
    return gaussian_fisher(d_mean, dist, d_sigma)


def gendyne_precision_single(r: float, z: float) -> float:
    """``Tr[F^-1]`` of single-mode general-dyne detection."""
    _check_z(z)
    e2 = np.exp(2 * r)
    return 0.25 * (2 + 1 / e2 + z + 1 / z + e2 * (1 + 4 * z / (e2**2 + z**2)))


def heterodyne_precision(r: float) -> float:
    """``Tr[F^-1]`` of heterodyne detection, ``2 cosh^4 r / cosh 2r``."""
    return 2 * np.cosh(r) ** 4 / np.cosh(2 * r)


def _two_mode_derivatives(r: float):
    d_mean = [
        np.array([1.0, 0.0, -1.0, 0.0]),
        np.array([0.0, 1.0, 0.0, -1.0]),
        np.zeros(4),
    ]
    e2 = np.exp(2 * r)
    d_cov = np.diag([2 * e2, -2 / e2, -2 / e2, 2 * e2])
    return d_mean, [np.zeros((4, 4)), np.zeros((4, 4)), 0.5 * d_cov]


def gendyne_fisher_two(r: float, z: float) -> np.ndarray:
    """Fisher matrix of product general-dyne ``diag(1/z, z, z, 1/z)`` on the two-mode model.

    As ``z -> 0`` this tends to :func:`double_homodyne_fisher_two`.
    """
    _check_z(z)
    state = two_mode_model_gaussian(ModelPoint.two(0.0, 0.0, r))
    meas = GendyneMeasurement(np.diag([1 / z, z, z, 1 / z]))
    d_mean, d_sigma = _two_mode_derivatives(r)
    return gaussian_fisher(d_mean, gendyne_distribution(state, meas), d_sigma)


def double_homodyne_fisher_two(r: float) -> np.ndarray:
    """Fisher matrix of ``p`` homodyne on mode 1 and ``q`` homodyne on mode 2.

    Built from the exact homodyne limit, whose precision matrix is supported on
    the two measured quadratures.
    """
    state = two_mode_model_gaussian(ModelPoint.two(0.0, 0.0, r))
    dist = gendyne_distribution(state, GendyneMeasurement.homodyne_limit(("p", "q")))
    d_mean, d_sigma = _two_mode_derivatives(r)
    return gaussian_fisher(d_mean, dist, d_sigma)


def double_homodyne_precision(r: float) -> float:
    return float(np.trace(np.linalg.inv(double_homodyne_fisher_two(r))))
