"""Covariance-matrix algebra for Gaussian states and general-dyne detection.

Quadratures are ordered as ``(q1, p1, q2, p2, ...)`` with hbar = 1 and the
vacuum covariance normalised to the identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

SYMMETRY_TOL = 1e-12
PHYSICALITY_TOL = 1e-10
PURITY_TOL = 1e-10


def symplectic_form(d: int) -> np.ndarray:
    """Return the ``2d x 2d`` symplectic form, a direct sum of ``[[0, 1], [-1, 0]]``."""
    if int(d) != d or d < 1:
        raise ValueError(f"number of modes must be a positive integer, got {d!r}")
    omega1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(int(d)), omega1)


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Symplectic eigenvalues of ``cov`` in ascending order (one per mode)."""
    cov = np.asarray(cov, dtype=float)
    d = cov.shape[0] // 2
    ev = np.linalg.eigvals(1j * symplectic_form(d) @ cov)
    # eigenvalues come in +/- pairs
    return np.sort(np.abs(ev.real))[::2]


@dataclass(frozen=True)
class CovarianceReport:
    symmetry_defect: float
    min_eigenvalue: float
    symplectic_eigenvalues: np.ndarray

    @property
    def is_valid(self) -> bool:
        return self.symmetry_defect <= SYMMETRY_TOL and self.min_eigenvalue >= -PHYSICALITY_TOL

    @property
    def is_pure(self) -> bool:
        return self.is_valid and bool(
            np.all(np.abs(self.symplectic_eigenvalues - 1.0) <= PURITY_TOL)
        )


def validate_covariance(cov: np.ndarray) -> CovarianceReport:
    """Check symmetry, the uncertainty relation ``cov + i Omega >= 0`` and purity.

    Raises:
        ValueError: if ``cov`` is not square with even dimension.
    """
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValueError(f"covariance must be square, got shape {cov.shape}")
    if cov.shape[0] % 2:
        raise ValueError(f"covariance dimension must be even, got {cov.shape[0]}")
    d = cov.shape[0] // 2
    sym = float(np.max(np.abs(cov - cov.T)))
    sym_cov = 0.5 * (cov + cov.T)
    min_eig = float(np.min(np.linalg.eigvalsh(sym_cov + 1j * symplectic_form(d))))
    return CovarianceReport(sym, min_eig, symplectic_eigenvalues(sym_cov))


@dataclass(frozen=True)
class GaussianState:
    """First moments and covariance matrix of a ``modes``-mode Gaussian state."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] % 2 or mean.shape != (cov.shape[0],):
            raise ValueError(
                f"inconsistent shapes: mean {mean.shape}, cov {cov.shape}"
            )
        report = validate_covariance(cov)
        if not report.is_valid:
            raise ValueError(
                "unphysical covariance matrix "
                f"(symmetry defect {report.symmetry_defect:.3g}, "
                f"min eigenvalue of cov + i*Omega {report.min_eigenvalue:.3g})"
            )
        if not np.all(np.isfinite(mean)):
            raise ValueError("mean vector must be finite")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def modes(self) -> int:
        return self.cov.shape[0] // 2

    @property
    def is_pure(self) -> bool:
        return validate_covariance(self.cov).is_pure


def squeezed_vacuum_cov(r: float) -> np.ndarray:
    """Covariance ``diag(e^{2r}, e^{-2r})`` of the squeezed vacuum ``S(r)|0>``."""
    if not np.isfinite(r):
        raise ValueError("squeezing must be finite")
    return np.diag([np.exp(2 * r), np.exp(-2 * r)])


def two_mode_squeezed_cov(r: float) -> np.ndarray:
    """Covariance of ``exp(r(a^dag b^dag - a b))|00>`` (before the beam splitter)."""
    c, s = np.cosh(2 * r), np.sinh(2 * r)
    zed = np.diag([1.0, -1.0])
    return np.block([[c * np.eye(2), s * zed], [s * zed, c * np.eye(2)]])


def displacement_mean(alpha: complex) -> np.ndarray:
    """Quadrature means produced by ``D(alpha)`` acting on a centred state."""
    return np.sqrt(2.0) * np.array([alpha.real, alpha.imag])


def balanced_bs_symplectic() -> np.ndarray:
    """Symplectic matrix of the balanced beam splitter.

    Realises ``a -> (a + b)/sqrt(2)``, ``b -> (b - a)/sqrt(2)`` on the
    quadrature vector; covariances transform as ``S @ cov @ S.T``.
    """
    eye = np.eye(2)
    return np.block([[eye, eye], [-eye, eye]]) / np.sqrt(2.0)


def _check_model(point, expected: str) -> None:
    if point.model.value != expected:
        raise ValueError(f"expected a {expected}-mode point, got {point.model.value}")


def single_mode_model_gaussian(point) -> GaussianState:
    """Gaussian description of ``D(alpha) S(r)|0>`` at ``point``."""
    _check_model(point, "single")
    t1, t2, r = point.theta
    return GaussianState(displacement_mean(complex(t1, t2)), squeezed_vacuum_cov(r))


def two_mode_model_gaussian(point) -> GaussianState:
    """Gaussian description of the two-mode model after the balanced beam splitter.

    The product ``D(alpha/sqrt2) S(r)|0> (x) D(-alpha/sqrt2) S(-r)|0>`` has mean
    ``(t1, t2, -t1, -t2)``: the sqrt(2) of the displacement convention cancels
    the beam-splitter 1/sqrt(2).
    """
    _check_model(point, "two")
    t1, t2, r = point.theta
    mean = np.array([t1, t2, -t1, -t2], dtype=float)
    cov = np.diag(np.exp([2 * r, -2 * r, -2 * r, 2 * r]))
    return GaussianState(mean, cov)


_QUADRATURES = ("q", "p")


@dataclass(frozen=True)
class GendyneMeasurement:
    """Ideal general-dyne POVM with seed covariance ``cov_m``.

    ``homodyne`` holds, per mode, ``None`` or the quadrature (``"q"``/``"p"``)
    measured in the singular homodyne limit. The 2x2 block of a homodyne mode
    in ``cov_m`` is ignored and stored as zeros; the limit is taken exactly.
    """

    cov_m: np.ndarray
    homodyne: tuple = field(default=())

    def __post_init__(self):
        cov_m = np.array(self.cov_m, dtype=float)
        if cov_m.ndim != 2 or cov_m.shape[0] != cov_m.shape[1] or cov_m.shape[0] % 2:
            raise ValueError(f"bad measurement covariance shape {cov_m.shape}")
        d = cov_m.shape[0] // 2
        homodyne = tuple(self.homodyne) or (None,) * d
        if len(homodyne) != d or any(h not in (None, *_QUADRATURES) for h in homodyne):
            raise ValueError(f"homodyne mask must list None/'q'/'p' per mode, got {homodyne}")
        masked = [2 * j + k for j, h in enumerate(homodyne) if h for k in (0, 1)]
        free = [i for i in range(2 * d) if i not in masked]
        if masked:
            if np.any(cov_m[np.ix_(masked, free)]):
                raise ValueError("homodyne modes cannot be correlated with other modes")
            cov_m[masked, :] = 0.0
            cov_m[:, masked] = 0.0
        if free:
            report = validate_covariance(_restrict_modes(cov_m, homodyne))
            if not report.is_pure:
                raise ValueError("non-homodyne part of cov_m must be a pure covariance")
        cov_m.setflags(write=False)
        object.__setattr__(self, "cov_m", cov_m)
        object.__setattr__(self, "homodyne", homodyne)

    @property
    def modes(self) -> int:
        return self.cov_m.shape[0] // 2

    @classmethod
    def heterodyne(cls, modes: int = 1) -> "GendyneMeasurement":
        return cls(np.eye(2 * modes))

    @classmethod
    def squeezed(cls, z: float) -> "GendyneMeasurement":
        """Single-mode general-dyne with ``cov_m = diag(z, 1/z)``."""
        if not z > 0:
            raise ValueError(f"z must be positive, got {z}")
        return cls(np.diag([z, 1.0 / z]))

    @classmethod
    def homodyne_limit(cls, quadratures: Sequence[str]) -> "GendyneMeasurement":
        """Exact homodyne of the listed quadrature on every mode."""
        d = len(quadratures)
        return cls(np.zeros((2 * d, 2 * d)), tuple(quadratures))


def _restrict_modes(cov: np.ndarray, homodyne: tuple) -> np.ndarray:
    keep = [2 * j + k for j, h in enumerate(homodyne) if h is None for k in (0, 1)]
    return cov[np.ix_(keep, keep)]


@dataclass(frozen=True)
class GaussianDistribution:
    """Outcome statistics of a general-dyne measurement on a Gaussian state.

    ``sigma_cap`` is ``(cov + cov_m)/2``. Directions listed in
    ``rank_deficient_directions`` are the conjugate quadratures discarded by a
    homodyne limit: their variance diverges, so the precision matrix vanishes
    there and the corresponding rows/columns of ``sigma_cap`` are stored as zero.
    """

    mean: np.ndarray
    sigma_cap: np.ndarray
    rank_deficient_directions: tuple = ()

    @property
    def support(self) -> list[int]:
        n = self.sigma_cap.shape[0]
        return [i for i in range(n) if i not in self.rank_deficient_directions]

    def precision(self) -> np.ndarray:
        """Inverse of ``sigma_cap`` on its support, zero on the discarded directions."""
        sup = self.support
        out = np.zeros_like(self.sigma_cap)
        out[np.ix_(sup, sup)] = np.linalg.inv(self.sigma_cap[np.ix_(sup, sup)])
        return out


def gendyne_distribution(
    state: GaussianState, measurement: GendyneMeasurement
) -> GaussianDistribution:
    """Gaussian outcome distribution of ``measurement`` performed on ``state``."""
    if state.modes != measurement.modes:
        raise ValueError(
            f"dimension mismatch: state has {state.modes} modes, "
            f"measurement {measurement.modes}"
        )
    sigma = 0.5 * (state.cov + measurement.cov_m)
    dropped = []
    for j, quad in enumerate(measurement.homodyne):
        if quad is not None:
            # the measured quadrature keeps variance cov/2; its conjugate diverges
            dropped.append(2 * j + (1 if quad == "q" else 0))
    if dropped:
        sigma = sigma.copy()
        sigma[dropped, :] = 0.0
        sigma[:, dropped] = 0.0
    return GaussianDistribution(state.mean.copy(), sigma, tuple(dropped))
