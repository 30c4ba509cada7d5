"""Closed-form and Monte Carlo correlators C1, C2, C3.

C1 = E_alpha[|<psi|alpha>|^4] with alpha ~ complex normal of variance E
per mode; C2 and C3 split the sampling energy across components z,
z_tilde, 1-z(-z_tilde). Closed forms exist for the Gaussian families
(one-mode, multi-mode, TMSV, products) and Fock targets; Monte Carlo
serves every family and doubles as the anti-typo oracle for the closed
forms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ConfigError
from .streams import substream
from .targets import (FockTarget, MultiModeGaussianTarget, OneModeGaussianTarget,
                      ProductTarget, RandomFockTarget, TmsvTarget, as_gaussian,
                      coherent_overlap_sq, target_mode_count)


@dataclass(frozen=True)
class CorrelatorEstimate:
    value: float
    std_error: float
    samples: int


def hyp2f1_eta(E_t: int) -> float:
    """eta = 2F1(1/2, -E_t; 1; 1), a terminating series in (0, 1]."""
    if E_t < 0:
        raise ConfigError("E_t must be nonnegative")
    total, term = 1.0, 1.0
    for k in range(E_t):
        term *= (0.5 + k) * (-E_t + k) / ((1.0 + k) * (k + 1.0))
        total += term
    return total


def _g1(x, zeta: float):
    return 1.0 + 4.0 * x + 4.0 * x * x / np.cosh(zeta) ** 2


def _r(x, gamma: complex, tau: float, zeta: float):
    g2 = abs(gamma) ** 2
    phi = np.angle(gamma) if gamma != 0 else 0.0
    return (2.0 * g2 + 4.0 * g2 * x / np.cosh(zeta) ** 2
            + 2.0 * np.tanh(zeta) * g2 * np.cos(2.0 * (phi + tau)))


def _fock_prefactor(E_t: int) -> float:
    # (2 E_t)! / (2^{E_t} E_t!)^2
    return float(np.exp(gammaln(2 * E_t + 1) - 2 * E_t * np.log(2.0)
                        - 2 * gammaln(E_t + 1)))


def _as_z_vector(z, M: int) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if z.shape == (1,) and M > 1:
        z = np.full(M, z[0])
    if z.shape != (M,):
        raise ConfigError(f"z must be scalar or length {M}")
    if np.any(z <= 0.0) or np.any(z >= 1.0):
        raise ConfigError("z components must lie strictly inside (0, 1)")
    return z


# ---------------------------------------------------------------------------
# Closed forms


def _c1_one_mode_gaussian(gamma, tau, zeta, E):
    g1 = _g1(E, zeta)
    return np.exp(-_r(E, gamma, tau, zeta) / g1) / (np.cosh(zeta) ** 2 * np.sqrt(g1))


def _c2_one_mode_gaussian(gamma, tau, zeta, E, z):
    g1z = _g1(z * E, zeta)
    g1w = _g1((1.0 - z) * E, zeta)
    return (np.exp(-_r(z * E, gamma, tau, zeta) / g1z)
            / (np.cosh(zeta) ** 2 * np.sqrt(g1z * g1w)))


def _multimode_gaussian_log(state, E, z_list):
    """log of 4^M det(K) exp{-4 xi^T [K - 4K (4K+S)^{-1} K] xi} /
    (sqrt(prod_i det(4K + S_i)) * prod(z) * E^{pM}) with S_i the
    block-diagonal 1/(z_ij E) matrices; the mean term uses the first S."""
    M = state.mode_count
    VI = state.cov + np.eye(2 * M)
    sign, logdet_vi = np.linalg.slogdet(VI)
    if sign <= 0:
        raise ConfigError("covariance + identity is not positive definite")
    K = np.linalg.inv(VI)
    xi = state.mean / 2.0
    log_val = M * np.log(4.0) - logdet_vi - len(z_list) * M * np.log(E)
    for i, z in enumerate(z_list):
        s_diag = np.repeat(1.0 / (np.asarray(z) * E), 2)
        A = 4.0 * K + np.diag(s_diag)
        sa, la = np.linalg.slogdet(A)
        if sa <= 0:
            raise ConfigError("4K + S is not positive definite")
        log_val -= 0.5 * la + float(np.sum(np.log(np.asarray(z))))
        if i == 0:
            y = np.linalg.solve(A, K @ xi)
            quad = xi @ (K @ xi) - 4.0 * (K @ xi) @ y
            log_val -= 4.0 * quad
    return log_val


def c1_closed(target, E: float) -> float:
    """Closed-form C1 for the target family at ensemble energy E."""
    if not E > 0:
        raise ConfigError("E must be > 0")
    if isinstance(target, OneModeGaussianTarget):
        p = target.params
        return float(_c1_one_mode_gaussian(p.gamma, p.tau, p.zeta, E))
    if isinstance(target, FockTarget):
        n = target.n
        log_c1 = (np.log(_fock_prefactor(n)) - 2.0 * n * np.log1p(1.0 / (2.0 * E))
                  - np.log1p(2.0 * E))
        return float(np.exp(log_c1))
    if isinstance(target, TmsvTarget):
        return float(1.0 / (np.cosh(target.zeta) ** 4 * _g1(E, target.zeta)))
    if isinstance(target, ProductTarget):
        out = 1.0
        for f in target.factors:
            out *= c1_closed(f, E)
        return out
    if isinstance(target, MultiModeGaussianTarget):
        return float(np.exp(_multimode_gaussian_log(target.state, E, [np.ones(target.state.mode_count)])))
    raise ConfigError(f"no closed-form C1 for target {target!r}; use mc_correlator")


def c2_closed(target, E: float, z, eta_mode: str = "lower") -> float:
    """Closed-form C2(z); eta_mode selects the Fock-family bound factor
    (eta = 2F1(1/2,-E_t,1,1) for 'lower', 1 for 'upper')."""
    if not E > 0:
        raise ConfigError("E must be > 0")
    if eta_mode not in ("lower", "upper"):
        raise ConfigError("eta_mode must be 'lower' or 'upper'")
    M = target_mode_count(target)
    zv = _as_z_vector(z, M)
    if isinstance(target, OneModeGaussianTarget):
        p = target.params
        return float(_c2_one_mode_gaussian(p.gamma, p.tau, p.zeta, E, zv[0]))
    if isinstance(target, FockTarget):
        return c2_fock_full(target.n, E, zv[0], eta_mode)
    if isinstance(target, TmsvTarget):
        ch2 = np.cosh(target.zeta) ** 2

        def g2(z1, z2):
            return 1.0 + 2.0 * (z1 + z2) * E + 4.0 * z1 * z2 * E * E / ch2

        return float(1.0 / (ch2 ** 2 * g2(zv[0], zv[1]) * g2(1 - zv[0], 1 - zv[1])))
    if isinstance(target, ProductTarget):
        out = 1.0
        for j, f in enumerate(target.factors):
            out *= c2_closed(f, E, zv[j], eta_mode)
        return out
    if isinstance(target, MultiModeGaussianTarget):
        return float(np.exp(_multimode_gaussian_log(target.state, E, [zv, 1.0 - zv])))
    raise ConfigError(f"no closed-form C2 for target {target!r}; use mc_correlator")


def c2_fock_full(E_t: int, E: float, z: float, eta_mode: str = "lower") -> float:
    """Full Fock-family C2(z) with the removable z=1/2 singularity handled
    by its analytic limit (the bracket tends to 1 + 2 E_t)."""
    if not (0.0 < z < 1.0):
        raise ConfigError("z must lie in (0, 1)")
    eta = hyp2f1_eta(E_t) if eta_mode == "lower" else 1.0
    A = _fock_prefactor(E_t)
    w = 1.0 - 2.0 * z
    if abs(w) < 1e-6:
        B = 1.0 + 2.0 * E_t
    else:
        den = z + 2.0 * (1.0 - z) * z * E
        Q = (1.0 + w / den) ** (2 * E_t)
        B = ((1.0 - z) * (1.0 + 2.0 * z * E) * Q
             - 2.0 * (1.0 - z) * z * E - z) / w
    tail = ((1.0 + 1.0 / (2.0 * z * E)) ** (-2 * E_t)
            / ((1.0 + 2.0 * (1.0 - z) * E) * (1.0 + 2.0 * z * E)))
    return float(eta * A * B * tail)


def c2_fock_asymptotic(E_t: int, E: float, z: float,
                       eta_mode: str = "lower") -> float:
    """Large-E simplification of the Fock C2 (bracket replaced by 1+2E_t)."""
    if not (0.0 < z < 1.0):
        raise ConfigError("z must lie in (0, 1)")
    eta = hyp2f1_eta(E_t) if eta_mode == "lower" else 1.0
    A = _fock_prefactor(E_t)
    tail = ((1.0 + 1.0 / (2.0 * z * E)) ** (-2 * E_t)
            / ((1.0 + 2.0 * (1.0 - z) * E) * (1.0 + 2.0 * z * E)))
    return float(eta * A * (1.0 + 2.0 * E_t) * tail)


def c3_closed_gaussian(target, E: float, z, z_tilde) -> float:
    """Closed-form C3(z, z_tilde) for Gaussian targets."""
    if not E > 0:
        raise ConfigError("E must be > 0")
    M = target_mode_count(target)
    zv = _as_z_vector(z, M)
    zt = _as_z_vector(z_tilde, M)
    rest = 1.0 - zv - zt
    if np.any(rest <= 0.0) or np.any(rest >= 1.0):
        raise ConfigError("1 - z - z_tilde must lie strictly inside (0, 1)")
    if isinstance(target, OneModeGaussianTarget):
        p = target.params
        g1z = _g1(zv[0] * E, p.zeta)
        g1t = _g1(zt[0] * E, p.zeta)
        g1r = _g1(rest[0] * E, p.zeta)
        return float(np.exp(-_r(zv[0] * E, p.gamma, p.tau, p.zeta) / g1z)
                     / (np.cosh(p.zeta) ** 2 * np.sqrt(g1z * g1t * g1r)))
    g = as_gaussian(target)
    if g is None:
        raise ConfigError(f"no closed-form C3 for target {target!r}")
    return float(np.exp(_multimode_gaussian_log(g, E, [zv, zt, rest])))


# ---------------------------------------------------------------------------
# Monte Carlo


def _complex_normal(rng, n: int, variances: np.ndarray) -> np.ndarray:
    """n draws of an M-vector with independent complex-normal components,
    component j of variance variances[j] (Re and Im each variances[j]/2)."""
    M = variances.shape[0]
    scale = np.sqrt(variances / 2.0)
    return scale * (rng.standard_normal((n, M)) + 1j * rng.standard_normal((n, M)))


def mc_correlator(kind: str, target, E: float, z=None, z_tilde=None,
                  N: int = 100_000, seed: int = 0) -> CorrelatorEstimate:
    """Monte Carlo estimate of C1, C2(z) or C3(z, z_tilde).

    Samples are drawn in fixed blocks of 2^16 from substream
    (seed, block_index), so the estimate depends only on (seed, N).
    """
    if N < 100:
        raise ConfigError("N must be >= 100")
    if not E > 0:
        raise ConfigError("E must be > 0")
    kind = kind.lower()
    if kind not in ("c1", "c2", "c3"):
        raise ConfigError("kind must be one of c1, c2, c3")
    M = target_mode_count(target)
    if kind in ("c2", "c3"):
        zv = _as_z_vector(z, M)
    if kind == "c3":
        zt = _as_z_vector(z_tilde, M)
        rest = 1.0 - zv - zt
        if np.any(rest <= 0.0):
            raise ConfigError("1 - z - z_tilde must be positive")

    block = 1 << 16
    total = 0.0
    total_sq = 0.0
    done = 0
    batch_index = 0
    while done < N:
        n = min(block, N - done)
        rng = substream(seed, batch_index)
        batch_index += 1
        if kind == "c1":
            a = _complex_normal(rng, n, np.full(M, E))
            f = coherent_overlap_sq(target, a) ** 2
        elif kind == "c2":
            az = _complex_normal(rng, n, zv * E)
            aw = _complex_normal(rng, n, (1.0 - zv) * E)
            f = (coherent_overlap_sq(target, az + aw)
                 * coherent_overlap_sq(target, az - aw))
        else:
            az = _complex_normal(rng, n, zv * E)
            at = _complex_normal(rng, n, zt * E)
            ar = _complex_normal(rng, n, rest * E)
            f = np.sqrt(coherent_overlap_sq(target, az + at + ar)
                        * coherent_overlap_sq(target, az + at - ar)
                        * coherent_overlap_sq(target, az - at - ar)
                        * coherent_overlap_sq(target, az - at + ar))
        total += float(np.sum(f))
        total_sq += float(np.sum(f * f))
        done += n
    mean = total / N
    var = max(total_sq / N - mean * mean, 0.0)
    return CorrelatorEstimate(mean, float(np.sqrt(var / N)), N)
