"""Gaussian-state formalism: means, covariance matrices, pure-state fidelity.

Conventions: quadratures q = m + m^dag, p = i(m^dag - m), ordered as
(q1, p1, ..., qM, pM); the vacuum covariance matrix is the identity.
Energy per mode is (qbar^2 + pbar^2)/4 + (trace of the mode's 2x2
covariance block - 2)/4, so the vacuum has energy 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConfigError, NumericalError
from .streams import as_rng


@dataclass(frozen=True)
class GaussianState:
    """Pure M-mode Gaussian state: mean quadrature vector + covariance."""

    mode_count: int
    mean: np.ndarray  # real, length 2M
    cov: np.ndarray   # real symmetric 2M x 2M, vacuum = I

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        n = 2 * self.mode_count
        if mean.shape != (n,) or cov.shape != (n, n):
            raise ConfigError("GaussianState dimensions inconsistent with mode_count")
        scale = max(1.0, np.abs(cov).max())
        if np.abs(cov - cov.T).max() > 1e-12 * scale:
            raise ConfigError("covariance matrix is not symmetric")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    def energy_per_mode(self) -> np.ndarray:
        """Photon number <m_j^dag m_j> for each mode."""
        out = np.empty(self.mode_count)
        for j in range(self.mode_count):
            b = slice(2 * j, 2 * j + 2)
            out[j] = (self.mean[b] @ self.mean[b]) / 4.0 + (np.trace(self.cov[b, b]) - 2.0) / 4.0
        return out


@dataclass(frozen=True)
class OneModeGaussianParams:
    """Rotated displaced squeezed state D(gamma) R(tau) S(zeta) |0>."""

    gamma: complex
    tau: float
    zeta: float

    def __post_init__(self):
        if not (np.isfinite(self.gamma) and np.isfinite(self.tau) and np.isfinite(self.zeta)):
            raise ConfigError("OneModeGaussianParams must be finite")


def symplectic_form(M: int) -> np.ndarray:
    """Block-diagonal symplectic form, [[0,1],[-1,0]] per mode."""
    w = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(M), w)


def one_mode_gaussian(p: OneModeGaussianParams) -> GaussianState:
    """Mean and covariance of D(gamma) R(tau) S(zeta) |0>."""
    g, t, z = p.gamma, p.tau, p.zeta
    mean = np.array([2.0 * g.real, 2.0 * g.imag])
    e2p, e2m = np.exp(2.0 * z), np.exp(-2.0 * z)
    st, ct = np.sin(t), np.cos(t)
    cov = np.array([
        [e2p * st * st + e2m * ct * ct, np.sin(2 * t) * np.sinh(2 * z)],
        [np.sin(2 * t) * np.sinh(2 * z), e2p * ct * ct + e2m * st * st],
    ])
    return GaussianState(1, mean, cov)


def tmsv(zeta: float) -> GaussianState:
    """Two-mode squeezed vacuum; energy sinh^2(zeta) per mode."""
    c, s = np.cosh(2.0 * zeta), np.sinh(2.0 * zeta)
    sz = np.diag([1.0, -1.0])
    cov = np.block([[c * np.eye(2), s * sz], [s * sz, c * np.eye(2)]])
    return GaussianState(2, np.zeros(4), cov)


def haar_unitary(M: int, rng) -> np.ndarray:
    """Haar-random M x M unitary via QR with phase-fixed R diagonal."""
    rng = as_rng(rng)
    z = (rng.standard_normal((M, M)) + 1j * rng.standard_normal((M, M))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def passive_symplectic(u: np.ndarray) -> np.ndarray:
    """Orthogonal-symplectic image of a mode-space unitary u.

    Mode operators transform as m_j -> sum_k u_jk m_k; the quadratures
    pick up 2x2 blocks [[Re u, -Im u], [Im u, Re u]].
    """
    M = u.shape[0]
    O = np.zeros((2 * M, 2 * M))
    O[0::2, 0::2] = u.real
    O[0::2, 1::2] = -u.imag
    O[1::2, 0::2] = u.imag
    O[1::2, 1::2] = u.real
    return O


def random_distributed_squeezed(M: int, r: float, seed) -> GaussianState:
    """Single-mode squeezer of strength r on mode 1, vacua elsewhere,
    conjugated by a Haar-random passive unitary. Zero mean, pure."""
    if M < 1:
        raise ConfigError("M must be >= 1")
    cov = np.eye(2 * M)
    cov[0, 0] = np.exp(-2.0 * r)
    cov[1, 1] = np.exp(2.0 * r)
    O = passive_symplectic(haar_unitary(M, as_rng(seed)))
    return GaussianState(M, np.zeros(2 * M), O @ cov @ O.T)


def fidelity_pure(a: GaussianState, b: GaussianState) -> float:
    """|<a|b>|^2 when at least one input is pure:
    2^M / sqrt(det(Va+Vb)) * exp(-d^T (Va+Vb)^{-1} d / 2), d = mean_a - mean_b.
    """
    if a.mode_count != b.mode_count:
        raise ConfigError("mode counts differ")
    M = a.mode_count
    S = a.cov + b.cov
    d = a.mean - b.mean
    sign, logdet = np.linalg.slogdet(S)
    if sign <= 0:
        raise NumericalError("V_a + V_b is singular or indefinite")
    x = scipy.linalg.lu_solve(scipy.linalg.lu_factor(S), d)
    return float(np.exp(M * np.log(2.0) - 0.5 * logdet - 0.5 * d @ x))


def coherent_fidelity(state: GaussianState, alphas: np.ndarray) -> np.ndarray:
    """|<state|alpha>|^2 for a batch of coherent vectors, vectorized.

    alphas: complex array (..., M). Returns real array of the batch shape.
    """
    alphas = np.asarray(alphas, dtype=complex)
    M = state.mode_count
    if alphas.shape[-1] != M:
        raise ConfigError("coherent vector length must equal mode count")
    S = state.cov + np.eye(2 * M)
    A = np.linalg.inv(S)
    sign, logdet = np.linalg.slogdet(S)
    if sign <= 0:
        raise NumericalError("V + I is singular or indefinite")
    c = np.exp(M * np.log(2.0) - 0.5 * logdet)
    x = np.empty(alphas.shape[:-1] + (2 * M,))
    x[..., 0::2] = 2.0 * alphas.real
    x[..., 1::2] = 2.0 * alphas.imag
    d = state.mean - x
    q = np.einsum("...i,ij,...j->...", d, A, d)
    return c * np.exp(-0.5 * q)
