"""Exact branch-superposition simulation of ECD circuits.

An M-mode, L-layer circuit applies, for each layer and each mode, a
qubit rotation followed by an echoed conditional displacement (ECD) of
that mode. The output on |0>_q |0...0>_m is an exact superposition of
2^{ML} coherent branches indexed by a sign vector s (last entry -1) and
the final qubit bit a; the branch displacement on mode j is
(-1)^a * (s^{(j)} . beta^{(j)}).

The rotation phase phi is stored in the relabeled convention
(phi_physical - pi/2 -> phi), under which the per-gate block matrix is

    [[e^{i phi} sin(th/2) D(-b),      cos(th/2) D(-b)],
     [        cos(th/2) D(b),  e^{i(pi-phi)} sin(th/2) D(b)]].

phi is sampled uniformly over a full period, so the relabel is
distribution-invariant; gradients are taken only w.r.t. theta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ConfigError
from .streams import as_rng

BRANCH_BUDGET_DEFAULT = 2 ** 22


@dataclass(frozen=True)
class CircuitParams:
    """All parameters of an M-mode, L-layer ECD circuit.

    Gate k (0-based, k = (layer index)*M + mode index) uses thetas[k],
    phis[k] and displaces mode k % M by betas[k // M, k % M].
    """

    M: int
    L: int
    betas: np.ndarray   # complex (L, M)
    thetas: np.ndarray  # real (M*L,)
    phis: np.ndarray    # real (M*L,)

    def __post_init__(self):
        betas = np.asarray(self.betas, dtype=complex)
        thetas = np.asarray(self.thetas, dtype=float)
        phis = np.asarray(self.phis, dtype=float)
        if betas.shape != (self.L, self.M):
            raise ConfigError("betas must have shape (L, M)")
        if thetas.shape != (self.M * self.L,) or phis.shape != (self.M * self.L,):
            raise ConfigError("thetas/phis must have length M*L")
        if not (np.all(np.isfinite(betas.view(float))) and np.all(np.isfinite(thetas))
                and np.all(np.isfinite(phis))):
            raise ConfigError("circuit parameters must be finite")
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "phis", phis)

    def with_theta(self, k: int, value: float) -> "CircuitParams":
        """Copy with thetas[k] replaced (0-based gate index)."""
        thetas = self.thetas.copy()
        thetas[k] = value
        return CircuitParams(self.M, self.L, self.betas, thetas, self.phis)


@dataclass(frozen=True)
class BranchState:
    """Output state as flat structure-of-arrays over 2^{ML} branches.

    a[i]: final qubit bit; v[i]: complex amplitude (includes the branch
    phase chi); alpha[i]: coherent displacement per mode; sign_bits[i]:
    bit t set iff gate t displaced by +beta_t (so s_t = (-1)^a * sigma_t).
    """

    M: int
    a: np.ndarray          # uint8 (n,)
    v: np.ndarray          # complex (n,)
    alpha: np.ndarray      # complex (n, M)
    sign_bits: np.ndarray  # uint64 (n,)

    @property
    def branch_count(self) -> int:
        return self.v.shape[0]

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.v) ** 2))


@dataclass(frozen=True)
class EnsembleSpec:
    """Energy-regularized circuit ensemble: beta ~ complex normal with
    variance E/L per gate, angles uniform on [0, 2pi)."""

    M: int
    L: int
    E: float

    def __post_init__(self):
        if self.M < 1 or self.L < 1 or not self.E > 0:
            raise ConfigError("EnsembleSpec requires M >= 1, L >= 1, E > 0")


def sample_circuit(spec: EnsembleSpec, rng) -> CircuitParams:
    """Draw circuit parameters from the energy-regularized ensemble."""
    rng = as_rng(rng)
    scale = np.sqrt(spec.E / (2.0 * spec.L))
    betas = scale * (rng.standard_normal((spec.L, spec.M))
                     + 1j * rng.standard_normal((spec.L, spec.M)))
    n = spec.M * spec.L
    thetas = rng.uniform(0.0, 2.0 * np.pi, n)
    phis = rng.uniform(0.0, 2.0 * np.pi, n)
    return CircuitParams(spec.M, spec.L, betas, thetas, phis)


def run_circuit(p: CircuitParams, branch_budget: int = BRANCH_BUDGET_DEFAULT) -> BranchState:
    """Evolve |0>_q |0>^M exactly, doubling the branch list per gate."""
    n_branches = 2 ** (p.M * p.L)
    if n_branches > branch_budget:
        raise CapacityError(
            f"2^(M*L) = {n_branches} branches exceeds budget {branch_budget}")

    a = np.zeros(1, dtype=np.uint8)
    v = np.ones(1, dtype=complex)
    alpha = np.zeros((1, p.M), dtype=complex)
    sign_bits = np.zeros(1, dtype=np.uint64)

    for t in range(p.M * p.L):
        layer, j = divmod(t, p.M)
        beta = p.betas[layer, j]
        th, ph = p.thetas[t], p.phis[t]
        sin_h, cos_h = np.sin(th / 2.0), np.cos(th / 2.0)
        # Child with new qubit bit 0 displaces by -beta, bit 1 by +beta.
        c0 = np.where(a == 0, np.exp(1j * ph) * sin_h, cos_h)
        c1 = np.where(a == 0, cos_h, np.exp(1j * (np.pi - ph)) * sin_h)
        # D(sb)|alpha_j> = e^{i Im(sb * conj(alpha_j))} |alpha_j + sb>
        braid0 = np.exp(1j * np.imag(-beta * np.conj(alpha[:, j])))
        braid1 = np.exp(1j * np.imag(beta * np.conj(alpha[:, j])))
        alpha0 = alpha.copy()
        alpha0[:, j] -= beta
        alpha1 = alpha.copy()
        alpha1[:, j] += beta
        a = np.concatenate([np.zeros_like(a), np.ones_like(a)])
        v = np.concatenate([v * c0 * braid0, v * c1 * braid1])
        alpha = np.concatenate([alpha0, alpha1])
        plus_bit = np.uint64(1) << np.uint64(t)
        sign_bits = np.concatenate([sign_bits, sign_bits | plus_bit])

    return BranchState(p.M, a, v, alpha, sign_bits)


def closed_form_weight(s: np.ndarray, a: int, thetas: np.ndarray,
                       phis: np.ndarray) -> complex:
    """Closed-form branch weight w_{s,a} = e^{i Phi_{s,a}(phi)} T_{s,a}(theta).

    s: sign vector of +-1 with s[-1] = -1; thetas/phis in gate order.
    Valid for one mode directly, and for M modes through the flattened
    (1, ML) index mapping (same formula).
    """
    s = np.asarray(s, dtype=int)
    n = s.shape[0]
    if s[-1] != -1:
        raise ConfigError("last sign-vector entry must be -1")
    if np.any(np.abs(s) != 1):
        raise ConfigError("sign vector entries must be +-1")
    ds = np.empty(n, dtype=int)
    ds[0] = (s[0] + 1) // 2
    ds[1:] = np.abs(s[1:] - s[:-1]) // 2
    n_s = n - 1 - int(ds[1:].sum())
    P = 1 - 2 * a
    phase = a * (n_s * np.pi + phis[0])
    phase += P * np.sum((ds - 1) * (s * phis - np.where(s == 1, np.pi, 0.0)))
    T = np.sin(thetas[0] / 2.0 + (P * s[0] + 1) * np.pi / 4.0)
    T *= np.prod(np.sin((thetas[1:] + ds[1:] * np.pi) / 2.0))
    return complex(T * np.exp(1j * phase))


def branch_phase(s: np.ndarray, betas_col: np.ndarray) -> float:
    """chi_s = sum_{l<l'} s_l s_l' Im(conj(beta_l) beta_l')."""
    s = np.asarray(s, dtype=float)
    b = np.asarray(betas_col, dtype=complex)
    if s.shape != b.shape:
        raise ConfigError("sign vector and displacement column lengths differ")
    cross = np.imag(np.conj(b)[:, None] * b[None, :])
    weights = np.triu(np.outer(s, s), k=1)
    return float(np.sum(weights * cross))


def branch_sign_vectors(state: BranchState, L: int) -> np.ndarray:
    """Recover s in {+-1}^{ML} per branch from sign_bits and the qubit bit."""
    n = state.branch_count
    ml = state.M * L
    bits = (state.sign_bits[:, None] >> np.arange(ml, dtype=np.uint64)) & np.uint64(1)
    sigma = 2.0 * bits.astype(int) - 1
    return (sigma * (1 - 2 * state.a.astype(int))[:, None]).astype(int)


def coherent_fock_matrix(alphas: np.ndarray, cutoff: int) -> np.ndarray:
    """<k|alpha> = e^{-|alpha|^2/2} alpha^k / sqrt(k!) for each branch.

    Returns complex (len(alphas), cutoff+1); evaluated in log-magnitude /
    phase form so large displacements do not overflow.
    """
    from scipy.special import gammaln

    alphas = np.asarray(alphas, dtype=complex)
    k = np.arange(cutoff + 1)
    absa = np.abs(alphas)
    safe = np.where(absa > 0, absa, 1.0)
    logmag = (-0.5 * absa[:, None] ** 2 + k[None, :] * np.log(safe)[:, None]
              - 0.5 * gammaln(k + 1)[None, :])
    phase = np.exp(1j * np.angle(alphas)[:, None] * k[None, :])
    out = np.exp(logmag) * phase
    zero = absa == 0
    if np.any(zero):
        out[zero] = 0.0
        out[zero, 0] = 1.0
    return out


def overlap(state: BranchState, target, cutoff: int | None = None,
            leak_bound: float = 1e-10) -> complex:
    """(<0|_q tensor <psi|) |state> via the target's Fock expansion.

    target: a TargetSpec or a prebuilt FockExpansion.
    """
    from .targets import FockExpansion, fock_expand

    if isinstance(target, FockExpansion):
        exp = target
    else:
        exp = fock_expand(target, cutoff=cutoff)
    if exp.leak > leak_bound:
        from .errors import AccuracyError
        raise AccuracyError(
            f"target expansion leak {exp.leak:.3e} exceeds bound {leak_bound:.3e}")
    if exp.M != state.M:
        raise ConfigError("target mode count differs from state")
    sel = state.a == 0
    v = state.v[sel]
    alpha = state.alpha[sel]
    cbar = np.conj(exp.coeffs)
    if state.M == 1:
        col = coherent_fock_matrix(alpha[:, 0], exp.cutoff)
        amp = col @ cbar
    elif state.M == 2:
        col1 = coherent_fock_matrix(alpha[:, 0], exp.cutoff)
        col2 = coherent_fock_matrix(alpha[:, 1], exp.cutoff)
        amp = np.einsum("bn,nm,bm->b", col1, cbar, col2, optimize=True)
    else:
        raise ConfigError("overlap supports M <= 2 Fock expansions")
    return complex(np.sum(v * amp))


def cost_branch(state: BranchState, target, cutoff: int | None = None,
                leak_bound: float = 1e-10) -> float:
    """Cost C = |<0_q, psi | state>|^2."""
    return abs(overlap(state, target, cutoff=cutoff, leak_bound=leak_bound)) ** 2


def state_energy(state: BranchState, chunk: int = 512) -> np.ndarray:
    """Exact per-mode photon number <m_j^dag m_j> including branch cross terms."""
    n = state.branch_count
    out = np.zeros(state.M)
    vbar = np.conj(state.v)
    for start in range(0, n, chunk):
        sl = slice(start, min(start + chunk, n))
        same_bit = state.a[sl, None] == state.a[None, :]
        # log of product of per-mode coherent overlaps <alpha_b|alpha_c>
        ab = state.alpha[sl]
        log_ov = (np.einsum("bj,cj->bc", np.conj(ab), state.alpha)
                  - 0.5 * np.sum(np.abs(ab) ** 2, axis=1)[:, None]
                  - 0.5 * np.sum(np.abs(state.alpha) ** 2, axis=1)[None, :])
        G = vbar[sl, None] * state.v[None, :] * same_bit * np.exp(log_ov)
        for j in range(state.M):
            out[j] += np.real(np.sum(G * np.conj(ab[:, j])[:, None]
                                     * state.alpha[None, :, j]))
    return out
