"""Brute-force Fock-space oracle for the single- and two-mode models.

States are built by exponentiating the truncated ladder-operator generators
and differentiated by central finite differences, so nothing here relies on
the closed-form derivatives, QFI or Uhlmann curvature used elsewhere in the
package. Two-mode vectors are stored row-major with mode 1 as the slow index.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .model import Model, ModelPoint

MIN_TRUNCATION = 20
_AUTO_START = 50
_AUTO_MAX = 400


class TruncationError(RuntimeError):
    """The truncated Fock space cannot hold the state within the tail budget."""


@dataclass(frozen=True)
class TruncationPolicy:
    """Fock cutoff and finite-difference settings.

    ``N=None`` selects the cutoff automatically: starting from 50 it is grown
    until the tail budget holds. An explicit ``N`` is used as given and a
    budget violation raises :class:`TruncationError`.
    """

    N: Optional[int] = None
    tail_tol: float = 1e-10
    fd_step: float = 1e-5

    def __post_init__(self):
        if self.N is not None and self.N < MIN_TRUNCATION:
            raise ValueError(f"truncation N must be >= {MIN_TRUNCATION}, got {self.N}")
        if not self.tail_tol > 0 or not self.fd_step > 0:
            raise ValueError("tail_tol and fd_step must be positive")


@dataclass(frozen=True)
class FockVector:
    """Amplitudes of a one- or two-mode state truncated at ``dim`` levels per mode."""

    dim: int
    amplitudes: np.ndarray
    modes: int = 1

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.dim**self.modes,):
            raise ValueError(f"expected {self.dim ** self.modes} amplitudes, got {amps.shape}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tail_weight(self) -> float:
        """Probability carried by the top 10% of Fock levels of any mode."""
        cut = self.dim - max(1, math.ceil(self.dim / 10))
        probs = np.abs(self.amplitudes.reshape((self.dim,) * self.modes)) ** 2
        levels = np.indices(probs.shape)
        return float(probs[np.any(levels >= cut, axis=0)].sum())

    def check(self, tail_tol: float) -> "FockVector":
        tail = self.tail_weight()
        norm2 = self.norm**2
        slack = max(tail_tol, 1e-13)
        if tail >= tail_tol or not (1 - slack <= norm2 <= 1 + 1e-13):
            raise TruncationError(
                f"truncation budget exceeded at N={self.dim}: tail weight {tail:.3g}, "
                f"norm^2 {norm2:.15f}, budget {tail_tol:.3g}"
            )
        return self

    def inner(self, other: "FockVector") -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def mode_lowering_matrix(N: int) -> np.ndarray:
    """Truncated annihilation operator with ``a[n-1, n] = sqrt(n)``."""
    if N < 2:
        raise ValueError(f"need at least two Fock levels, got {N}")
    return np.diag(np.sqrt(np.arange(1, N, dtype=float)), k=1).astype(complex)


def unitary_from_generator(G: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """``exp(G)`` for an anti-Hermitian ``G`` (scaling and squaring Pade).

    Raises:
        ValueError: if ``G`` is not anti-Hermitian to ``tol``.
        ArithmeticError: if the result is not unitary to 1e-9.
    """
    G = np.asarray(G, dtype=complex)
    if np.max(np.abs(G + G.conj().T), initial=0.0) > tol:
        raise ValueError("generator is not anti-Hermitian")
    U = scipy.linalg.expm(G)
    if np.max(np.abs(U.conj().T @ U - np.eye(len(U))), initial=0.0) > 1e-9:
        raise ArithmeticError("matrix exponential lost unitarity")
    return U


def displacement(alpha: complex, N: int) -> np.ndarray:
    """Dense truncated ``D(alpha) = exp(alpha a^dag - alpha^* a)``."""
    return unitary_from_generator(displacement_generator(alpha, N).toarray())


def squeezing(r: float, N: int) -> np.ndarray:
    """Dense truncated ``S(r) = exp((r a^dag^2 - r a^2)/2)`` for real ``r``."""
    return unitary_from_generator(squeezing_generator(r, N).toarray())


def _sparse_lowering(N: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, N, dtype=float)), 1, format="csr", dtype=complex)


def displacement_generator(alpha: complex, N: int) -> sp.csr_matrix:
    a = _sparse_lowering(N)
    return (alpha * a.conj().T - np.conj(alpha) * a).tocsr()


def squeezing_generator(r: float, N: int) -> sp.csr_matrix:
    a2 = _sparse_lowering(N) @ _sparse_lowering(N)
    return (0.5 * r * (a2.conj().T - a2)).tocsr()


@functools.lru_cache(maxsize=512)
def _squeezed_column(r: float, N: int, n: int) -> np.ndarray:
    ket = np.zeros(N, dtype=complex)
    ket[n] = 1.0
    out = expm_multiply(squeezing_generator(r, N), ket)
    out.flags.writeable = False
    return out


def _displaced_squeezed(alpha: complex, r: float, N: int, n: int = 0) -> np.ndarray:
    """``D(alpha) S(r)|n>`` in the truncated space."""
    return expm_multiply(displacement_generator(alpha, N), _squeezed_column(r, N, n))


def _two_mode_ops(N: int):
    a1 = _sparse_lowering(N)
    eye = sp.identity(N, dtype=complex, format="csr")
    return sp.kron(a1, eye, format="csr"), sp.kron(eye, a1, format="csr")


def two_mode_squeezing_generator(N: int) -> sp.csr_matrix:
    """``a^dag b^dag - a b`` on the two-mode truncated space."""
    a, b = _two_mode_ops(N)
    ab = a @ b
    return (ab.conj().T - ab).tocsr()


def beam_splitter_generator(N: int) -> sp.csr_matrix:
    """``(pi/4)(a^dag b - a b^dag)``, the balanced beam splitter generator."""
    a, b = _two_mode_ops(N)
    g = a.conj().T @ b - a @ b.conj().T
    return (np.pi / 4 * g).tocsr()


def _vacuum(N: int, modes: int) -> np.ndarray:
    v = np.zeros(N**modes, dtype=complex)
    v[0] = 1.0
    return v


def _raw_state(model: Model, theta: tuple, N: int, frame: str) -> FockVector:
    # theta may leave the physical domain (r < 0) at finite-difference neighbours
    alpha, r = complex(theta[0], theta[1]), theta[2]
    if model is Model.SINGLE:
        return FockVector(N, _displaced_squeezed(alpha, r, N))
    if frame == "original":
        vec = expm_multiply(r * two_mode_squeezing_generator(N), _vacuum(N, 2))
        vec = expm_multiply(displacement_generator(alpha, N), vec.reshape(N, N))
        return FockVector(N, vec.ravel(), 2)
    if frame == "factored":
        s = np.sqrt(2.0)
        e0 = _displaced_squeezed(alpha / s, r, N)
        f0 = _displaced_squeezed(-alpha / s, -r, N)
        return FockVector(N, np.kron(e0, f0), 2)
    raise ValueError(f"unknown frame {frame!r}; use 'original' or 'factored'")


def _shifted(point: ModelPoint, mu: int, h: float) -> tuple:
    theta = list(point.theta)
    theta[mu] += h
    return tuple(theta)


def resolve_truncation(
    point: ModelPoint, policy: TruncationPolicy, frame: str = "original"
) -> TruncationPolicy:
    """Return ``policy`` with a concrete cutoff that meets the tail budget at ``point``.

    The probe includes the finite-difference neighbours in ``r``, which carry the
    heaviest tail.
    """
    return _resolve_cached(point.model, point.theta, policy, frame)


@functools.lru_cache(maxsize=1024)
def _resolve_cached(model, theta, policy, frame):
    point = ModelPoint(model, theta)
    probe = _shifted(point, 2, policy.fd_step)
    if policy.N is not None:
        _raw_state(point.model, probe, policy.N, frame).check(policy.tail_tol)
        return policy
    N = _AUTO_START
    while True:
        try:
            _raw_state(point.model, probe, N, frame).check(policy.tail_tol)
            return replace(policy, N=N)
        except TruncationError:
            if N >= _AUTO_MAX:
                raise
            N = min(_AUTO_MAX, int(N * 1.25))


def model_state(
    point: ModelPoint, policy: TruncationPolicy = TruncationPolicy(), frame: str = "original"
) -> FockVector:
    """Truncated state vector of the model at ``point``.

    For the two-mode model ``frame="original"`` gives
    ``(D(alpha) (x) I) S2(r)|00>`` and ``frame="factored"`` the product state
    ``D(alpha/sqrt2)S(r)|0> (x) D(-alpha/sqrt2)S(-r)|0>``.

    Raises:
        TruncationError: if the tail budget is exceeded.
    """
    policy = resolve_truncation(point, policy, frame)
    return _raw_state(point.model, point.theta, policy.N, frame).check(policy.tail_tol)


def model_basis(
    point: ModelPoint, n: int, m: Optional[int] = None, policy: TruncationPolicy = TruncationPolicy()
) -> FockVector:
    """Displaced-squeezed number state ``|e_n>`` (single) or ``|e_n f_m>`` (two-mode, factored)."""
    policy = resolve_truncation(point, policy, "factored")
    N, alpha, r = policy.N, point.alpha, point.r
    if point.model is Model.SINGLE:
        return FockVector(N, _displaced_squeezed(alpha, r, N, n))
    s = np.sqrt(2.0)
    e_n = _displaced_squeezed(alpha / s, r, N, n)
    f_m = _displaced_squeezed(-alpha / s, -r, N, m or 0)
    return FockVector(N, np.kron(e_n, f_m), 2)


def bs_factorization_check(
    point: ModelPoint, policy: TruncationPolicy = TruncationPolicy(tail_tol=1e-18)
) -> float:
    """``|| U_BS |psi_theta> - product state ||`` for the two-mode model."""
    if point.model is not Model.TWO:
        raise ValueError("beam-splitter factorisation applies to the two-mode model")
    N = max(resolve_truncation(point, policy, f).N for f in ("original", "factored"))
    psi = _raw_state(point.model, point.theta, N, "original").check(policy.tail_tol)
    prod = _raw_state(point.model, point.theta, N, "factored").check(policy.tail_tol)
    out = expm_multiply(beam_splitter_generator(N), psi.amplitudes)
    return float(np.linalg.norm(out - prod.amplitudes))


def fd_derivatives(
    point: ModelPoint, policy: TruncationPolicy = TruncationPolicy(), frame: str = "original"
) -> tuple[FockVector, FockVector, FockVector]:
    """Central finite-difference derivatives of the state with respect to ``theta``."""
    policy = resolve_truncation(point, policy, frame)
    h, N = policy.fd_step, policy.N
    out = []
    for mu in range(3):
        plus = _raw_state(point.model, _shifted(point, mu, h), N, frame).check(policy.tail_tol)
        minus = _raw_state(point.model, _shifted(point, mu, -h), N, frame).check(policy.tail_tol)
        out.append(
            FockVector(N, (plus.amplitudes - minus.amplitudes) / (2 * h), plus.modes)
        )
    return tuple(out)


def _geometric_tensor(point, policy, frame):
    policy = resolve_truncation(point, policy, frame)
    psi = model_state(point, policy, frame).amplitudes
    ders = np.stack([d.amplitudes for d in fd_derivatives(point, policy, frame)])
    overlap = ders.conj() @ psi  # <d_mu|psi>
    return ders.conj() @ ders.T - np.outer(overlap, overlap.conj())


def oracle_qfi_uhlmann(
    point: ModelPoint, policy: TruncationPolicy = TruncationPolicy(), frame: str = "original"
) -> tuple[np.ndarray, np.ndarray]:
    """QFI matrix and Uhlmann curvature from finite-difference state derivatives.

    Uses ``G = <d psi|d psi> - <d psi|psi><psi|d psi>``; ``Q = 4 Re G`` and
    ``D = 4 Im G``.
    """
    g = _geometric_tensor(point, policy, frame)
    return 4 * g.real, 4 * g.imag


def sld_lyapunov_residual(
    point: ModelPoint, policy: TruncationPolicy = TruncationPolicy(), frame: str = "original"
) -> float:
    """Largest Frobenius norm of ``(L rho + rho L)/2 - d rho`` over the parameters.

    ``L = 2(|psi><d psi| + |d psi><psi|)``. All operators live in the span of
    ``psi`` and ``d psi``, so products are evaluated on 2x2 coefficient matrices
    weighted by the Gram matrix instead of forming dense operators.
    """
    policy = resolve_truncation(point, policy, frame)
    psi = model_state(point, policy, frame).amplitudes
    worst = 0.0
    for der in fd_derivatives(point, policy, frame):
        basis = np.stack([psi, der.amplitudes], axis=1)
        gram = basis.conj().T @ basis
        rho = np.array([[1, 0], [0, 0]], dtype=complex)
        drho = np.array([[0, 1], [1, 0]], dtype=complex)
        sld = 2 * drho
        res = 0.5 * (sld @ gram @ rho + rho @ gram @ sld) - drho
        worst = max(worst, float(np.sqrt(abs(np.trace(res @ gram @ res.conj().T @ gram)))))
    return worst


def quadrature_moments(state: FockVector) -> tuple[np.ndarray, np.ndarray]:
    """First moments and covariance ``<{dr, dr^T}>`` of a Fock-space state."""
    N, d = state.dim, state.modes
    a = _sparse_lowering(N)
    eye = sp.identity(N, dtype=complex, format="csr")
    ops = []
    for j in range(d):
        aj = a
        for k in range(d):
            if k != j:
                aj = sp.kron(aj, eye, format="csr") if k > j else sp.kron(eye, aj, format="csr")
        ops.append((aj + aj.conj().T) / np.sqrt(2.0))
        ops.append((aj - aj.conj().T) / (1j * np.sqrt(2.0)))
    psi = state.amplitudes
    applied = [op @ psi for op in ops]
    mean = np.array([np.vdot(psi, v).real for v in applied])
    second = np.array([[np.vdot(u, v) for v in applied] for u in applied])
    cov = 2 * (second.real - np.outer(mean, mean))
    return mean, cov
