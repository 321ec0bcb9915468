"""Holevo Cramer-Rao bound of the single- and two-mode models.

Locally unbiased observables ``X_1, X_2, X_3`` are represented by their
matrix elements ``<psi|X_k|b_i>`` between the model state and the remaining
vectors ``b_i`` of the derivative subspace: ``{e_1, e_2}`` for one mode,
``{lambda_2, ..., lambda_5} = {e0f1, e1f0, e0f2, e2f0}`` for two modes. All
other elements vanish, so ``Z_jk = sum_i <psi|X_j|b_i> conj(<psi|X_k|b_i>)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar

from .estimation_bounds import gendyne_precision_single
from .model import Model, ModelPoint

log = logging.getLogger(__name__)

N_FREE = {Model.SINGLE: 3, Model.TWO: 15}
_SQRT2 = np.sqrt(2.0)


class ConvergenceError(RuntimeError):
    """No restart of an optimisation met its convergence criterion."""


@dataclass(frozen=True)
class SubspaceFreeParams:
    """Free real parameters of the locally unbiased family.

    ``(beta, gamma, delta)`` for one mode, ``(x1, ..., x15)`` for two modes.
    """

    model: Model
    values: np.ndarray

    def __post_init__(self):
        model = Model(self.model)
        values = np.asarray(self.values, dtype=float).ravel()
        if values.size != N_FREE[model]:
            raise ValueError(
                f"{model.value}-mode family has {N_FREE[model]} free parameters, got {values.size}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("free parameters must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "model", model)
        object.__setattr__(self, "values", values)


def _values(fp, model: Model) -> np.ndarray:
    if isinstance(fp, SubspaceFreeParams):
        if fp.model is not model:
            raise ValueError(f"expected {model.value}-mode parameters, got {fp.model.value}")
        return fp.values
    return SubspaceFreeParams(model, fp).values


def x_rows_single(r: float, fp) -> np.ndarray:
    """``<e_0|X_k|e_i>`` for ``k = 1..3`` (rows) and ``i = 1, 2`` (columns)."""
    beta, gamma, delta = _values(fp, Model.SINGLE)
    return np.array(
        [
            [np.exp(r) / 2, 1j * beta],
            [-0.5j * np.exp(-r), 1j * gamma],
            [0.0, 1 / _SQRT2 + 1j * delta],
        ]
    )


def x_rows_two(r: float, fp) -> np.ndarray:
    """``<lambda_1|X_k|lambda_i>`` for ``k = 1..3`` (rows) and ``i = 2..5`` (columns).

    The imaginary part of ``<lambda_1|X_2|lambda_2>`` is tied to ``x7`` so that
    the unbiasedness condition for the second parameter holds for every ``x``.
    """
    x = _values(fp, Model.TWO)
    e1, e2 = np.exp(r), np.exp(2 * r)
    off = e1 / _SQRT2
    return np.array(
        [
            [x[0] + 1j * e2 * x[1], off + e2 * x[0] + 1j * x[1], x[2] + 1j * x[3], x[2] + 1j * x[4]],
            [x[5] + 1j * (off + e2 * x[6]), e2 * x[5] + 1j * x[6], x[7] + 1j * x[8], x[7] + 1j * x[9]],
            [x[10] + 1j * e2 * x[11], e2 * x[10] + 1j * x[11], x[12] + 1j * x[13], x[12] + 1 / _SQRT2 + 1j * x[14]],
        ]
    )


def _z_from_rows(rows: np.ndarray) -> np.ndarray:
    return rows @ rows.conj().T


def z_matrix_single(r: float, fp) -> np.ndarray:
    """Hermitian ``Z`` matrix of the single-mode model."""
    return _z_from_rows(x_rows_single(r, fp))


def z_matrix_two(r: float, fp) -> np.ndarray:
    """Hermitian ``Z`` matrix of the two-mode model."""
    return _z_from_rows(x_rows_two(r, fp))


def trace_norm_hermitian(M: np.ndarray, tol: float = 1e-10) -> float:
    """Trace norm of a Hermitian matrix, the sum of its absolute eigenvalues.

    Raises:
        ValueError: if ``M`` is not Hermitian to ``tol``.
    """
    M = np.asarray(M, dtype=complex)
    if np.max(np.abs(M - M.conj().T), initial=0.0) > tol:
        raise ValueError("matrix is not Hermitian")
    return float(np.sum(np.abs(np.linalg.eigvalsh(M))))


def h_value(Z: np.ndarray) -> float:
    """Holevo function ``Tr[Re Z] + ||Im Z||_1``."""
    Z = np.asarray(Z, dtype=complex)
    # Im Z is real antisymmetric; i * Im Z is Hermitian with the same singular values
    return float(np.trace(Z.real)) + trace_norm_hermitian(1j * Z.imag)


def derivative_coefficients(point: ModelPoint) -> np.ndarray:
    """Components of ``|d_mu psi>`` (rows) in the derivative-subspace basis (columns).

    Basis ``(e_0, e_1, e_2)`` for one mode and ``(lambda_1, ..., lambda_5)`` for two.
    """
    t1, t2, r = point.theta
    if point.model is Model.SINGLE:
        return np.array(
            [
                [-1j * t2, np.exp(-r), 0.0],
                [1j * t1, 1j * np.exp(r), 0.0],
                [0.0, 0.0, 1 / _SQRT2],
            ]
        )
    ep, em = np.exp(r) / _SQRT2, np.exp(-r) / _SQRT2
    return np.array(
        [
            [-1j * t2, -ep, em, 0.0, 0.0],
            [1j * t1, -1j * em, 1j * ep, 0.0, 0.0],
            [0.0, 0.0, 0.0, -1 / _SQRT2, 1 / _SQRT2],
        ]
    )


def x_operators(point: ModelPoint, fp) -> np.ndarray:
    """The three Hermitian ``X_k`` as matrices on the derivative subspace."""
    rows = (x_rows_single if point.model is Model.SINGLE else x_rows_two)(point.r, fp)
    k = rows.shape[1] + 1
    ops = np.zeros((3, k, k), dtype=complex)
    ops[:, 0, 1:] = rows
    ops[:, 1:, 0] = rows.conj()
    return ops


def locally_unbiased_residuals(point: ModelPoint, fp) -> tuple[np.ndarray, np.ndarray]:
    """Residuals of ``Tr[rho X_j] = 0`` and ``Tr[d_j rho X_k] = delta_jk``."""
    ops = x_operators(point, fp)
    coeffs = derivative_coefficients(point)
    first = ops[:, 0, 0].real
    # Tr[d_j rho X_k] = 2 Re <psi|X_k|d_j psi>
    second = np.array([[2 * (ops[k, 0, :] @ coeffs[j]).real for k in range(3)] for j in range(3)])
    return first, second - np.eye(3)


@dataclass(frozen=True)
class MinimizerConfig:
    """Multi-start settings for :func:`minimize_h`."""

    restarts: int = 24
    tol: float = 1e-10
    max_iter: int = 4000
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass(frozen=True)
class HcrbResult:
    value: float
    argmin: SubspaceFreeParams
    converged_restarts: int


class _AffineFamily:
    """The X-operator elements as an affine map ``x -> c + M x`` in real coordinates.

    Optimisation runs in orthonormal coordinates ``y = R x + Q^T c`` (with
    ``M = Q R``), where ``Tr[Re Z] = |c_perp|^2 + |y|^2`` is perfectly conditioned.
    """

    def __init__(self, model: Model, r: float):
        self.model = model
        self.rows_fn = x_rows_single if model is Model.SINGLE else x_rows_two
        self.r = r
        n = N_FREE[model]
        c = self._flat(np.zeros(n))
        M = np.stack([self._flat(e) - c for e in np.eye(n)], axis=1)
        self.Q, self.R = np.linalg.qr(M)
        self.shift = self.Q.T @ c
        self.c_perp = c - self.Q @ self.shift
        self.shape = self.rows_fn(r, np.zeros(n)).shape

    def _flat(self, x):
        rows = self.rows_fn(self.r, x)
        return np.concatenate([rows.real.ravel(), rows.imag.ravel()])

    def to_y(self, x):
        return self.R @ x + self.shift

    def to_x(self, y):
        return np.linalg.solve(self.R, y - self.shift)

    def _split(self, y):
        v = self.c_perp + self.Q @ y
        half = v.size // 2
        return v, v[:half].reshape(self.shape), v[half:].reshape(self.shape)

    def value(self, y) -> float:
        v, P, S = self._split(y)
        a01 = S[0] @ P[1] - P[0] @ S[1]
        a02 = S[0] @ P[2] - P[0] @ S[2]
        a12 = S[1] @ P[2] - P[1] @ S[2]
        return float(v @ v + 2 * np.sqrt(a01 * a01 + a02 * a02 + a12 * a12))

    def h(self, y, eps: float = 0.0):
        """Holevo function (smoothed by ``eps``) and its gradient in ``y``.

        For 3x3 ``Z``, ``||Im Z||_1 = 2 |a|`` with ``a`` the upper-triangular
        entries of ``Im Z``; the smoothing replaces ``|a|`` by ``sqrt(|a|^2 + eps^2)``.
        """
        v, P, S = self._split(y)
        # Im(v_j . conj(v_k)) = S_j . P_k - P_j . S_k
        pairs = ((0, 1), (0, 2), (1, 2))
        a = np.array([S[j] @ P[k] - P[j] @ S[k] for j, k in pairs])
        norm = np.sqrt(a @ a + eps * eps)
        value = v @ v + 2 * norm
        gP = np.zeros_like(P)
        gS = np.zeros_like(S)
        if norm > 0:
            for (j, k), aj in zip(pairs, a):
                w = 2 * aj / norm
                gP[k] += w * S[j]
                gS[j] += w * P[k]
                gP[j] -= w * S[k]
                gS[k] -= w * P[j]
        grad = 2 * v + np.concatenate([gP.ravel(), gS.ravel()])
        return value, self.Q.T @ grad


_SMOOTHING = tuple(10.0 ** -k for k in range(1, 12))


def _one_restart(fam: _AffineFamily, y0: np.ndarray, cfg: MinimizerConfig):
    f = fam.value
    n = y0.size
    # coarse derivative-free descent on the exact (kinked) objective
    res = minimize(
        f, y0, method="Nelder-Mead",
        options=dict(maxiter=min(cfg.max_iter, 40 * n), xatol=1e-4, fatol=1e-6, adaptive=True),
    )
    y = res.x
    # smoothing continuation through the kink of the trace norm at Im Z = 0
    for eps in _SMOOTHING:
        sm = minimize(
            fam.h, y, args=(eps,), jac=True, method="BFGS",
            options=dict(gtol=1e-12, maxiter=50 * n),
        )
        y = sm.x
    # derivative-free confirmation: a tiny simplex must collapse within tol
    simplex = np.vstack([y, y + 1e-7 * np.eye(n)])
    fin = minimize(
        f, y, method="Nelder-Mead",
        options=dict(initial_simplex=simplex, maxiter=cfg.max_iter, xatol=1e-6,
                     fatol=cfg.tol, adaptive=True),
    )
    best = fin.x if fin.fun <= f(y) else y
    return float(f(best)), best, bool(fin.success)


def minimize_h(point: ModelPoint, cfg: MinimizerConfig = MinimizerConfig()) -> HcrbResult:
    """Holevo Cramer-Rao bound by multi-start minimisation of the Holevo function.

    Restarts are drawn uniformly from ``[-2, 2]^n`` in the free parameters with
    ``numpy.random.default_rng(cfg.seed)``. The lowest value wins; among values
    within ``cfg.tol`` of it the argmin with the smallest norm is reported.

    Raises:
        ConvergenceError: if no restart converged.
    """
    model = point.model
    fam = _AffineFamily(model, point.r)
    rng = np.random.default_rng(cfg.seed)
    starts = rng.uniform(-2.0, 2.0, size=(cfg.restarts, N_FREE[model]))
    runs = [_one_restart(fam, fam.to_y(x0), cfg) for x0 in starts]
    good = [(val, fam.to_x(y)) for val, y, ok in runs if ok]
    if not good:
        raise ConvergenceError(
            f"none of {cfg.restarts} restarts converged for {model.value}-mode r={point.r}"
        )
    best = min(val for val, _ in good)
    ties = [x for val, x in good if val <= best + cfg.tol]
    x_best = min(ties, key=np.linalg.norm)
    log.debug("minimize_h %s r=%g: %.15g (%d/%d converged)",
              model.value, point.r, best, len(good), cfg.restarts)
    return HcrbResult(best, SubspaceFreeParams(model, x_best), len(good))


def hcrb_closed(point: ModelPoint) -> float:
    """Closed-form HCRB.

    The single-mode expression is exact. The two-mode expression
    ``1/4 + e^{-2r}`` is a conjecture read off the numerical minimum (it equals
    the double-homodyne precision); :func:`minimize_h` is the ground truth.
    """
    r = point.r
    if point.model is Model.SINGLE:
        return (np.cosh(2 * r) + 2) / 2
    return 0.25 + np.exp(-2 * r)


def gendyne_gap(z: float, r: float) -> float:
    """Excess of single-mode general-dyne precision over the HCRB, ``f(z, r)``."""
    return gendyne_precision_single(r, z) - hcrb_closed(ModelPoint.single(r=r))


def _stationary_z(r: float) -> list[float]:
    """Positive ``z`` with ``df/dz = 0``.

    With ``E = e^{2r}`` and ``y = z^2`` the condition is the cubic
    ``y^3 + (2E^2 - 1 - 4E) y^2 + (E^4 - 2E^2 + 4E^3) y - E^4 = 0``; in
    ``w = y/E`` its coefficients are exact at ``r = 0``, where it has a triple
    root at ``w = 1``.
    """
    E = np.exp(2 * r)
    return [float(np.sqrt(E * w)) for w in _real_cubic_roots(2 * E - 1 / E - 4, E * E + 4 * E - 2, -E) if w > 0]


def _real_cubic_roots(b: float, c: float, d: float) -> list[float]:
    """Real roots of ``w^3 + b w^2 + c w + d`` (trigonometric/Cardano form)."""
    p = c - b * b / 3
    q = 2 * b**3 / 27 - b * c / 3 + d
    shift = -b / 3
    disc = (q / 2) ** 2 + (p / 3) ** 3
    if p == 0 and q == 0:
        return [shift]
    if disc > 0:
        s = np.sqrt(disc)
        return [float(np.cbrt(-q / 2 + s) + np.cbrt(-q / 2 - s) + shift)]
    m = 2 * np.sqrt(-p / 3)
    arg = np.clip(3 * q / (p * m), -1.0, 1.0)
    phi = np.arccos(arg) / 3
    return [float(m * np.cos(phi - 2 * np.pi * k / 3) + shift) for k in range(3)]


@lru_cache(maxsize=4096)
def optimal_gendyne(r: float, tol: float = 1e-8) -> tuple[float, float]:
    """Best single-mode general-dyne ``z_opt(r)`` and the residual gap ``f_opt(r)``.

    A bounded Brent search over ``log z`` in ``[-6, 6]`` locates the minimum;
    because ``f`` is extremely flat near ``r = 0`` (quartic in ``log z``), the
    result is then snapped to the nearest exact stationary point when that does
    not increase ``f``.

    Raises:
        ConvergenceError: if the bracketed search fails.
    """
    f = lambda u: gendyne_gap(np.exp(u), r)
    res = minimize_scalar(f, bounds=(-6.0, 6.0), method="bounded", options=dict(xatol=tol))
    if not res.success:
        raise ConvergenceError(f"z_opt search failed at r={r}: {res.message}")
    z, val = float(np.exp(res.x)), float(res.fun)
    for cand in _stationary_z(r):
        if abs(np.log(cand) - res.x) < 1e-2:
            cv = gendyne_gap(cand, r)
            if cv <= val + 1e-14:
                z, val = cand, cv
    return z, val


def stationarity(z: float, r: float) -> float:
    """``df/dz`` of the general-dyne gap (closed form)."""
    E = np.exp(2 * r)
    return 0.25 * (1 - 1 / z**2 + 4 * E * (E * E - z * z) / (E * E + z * z) ** 2)


def refine_z_opt(r: float, bracket: tuple[float, float]) -> float:
    """Root of :func:`stationarity` inside ``bracket`` (an independent route to ``z_opt``)."""
    return brentq(stationarity, *bracket, args=(r,), xtol=1e-14)
