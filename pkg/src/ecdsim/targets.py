"""Target-state families and their Fock expansions.

TargetSpec is a tagged union of the preparable targets: one-mode
Gaussian (displaced rotated squeezed vacuum), Fock number state,
product of one-mode targets, generic multi-mode Gaussian, two-mode
squeezed vacuum, and random-coefficient Fock superpositions.
Fock expansions provide a single uniform mechanism for complex
overlaps with coherent branches.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import AccuracyError, ConfigError
from .gaussian import (GaussianState, OneModeGaussianParams, coherent_fidelity,
                       one_mode_gaussian, tmsv)
from .streams import as_rng


@dataclass(frozen=True)
class OneModeGaussianTarget:
    params: OneModeGaussianParams


@dataclass(frozen=True)
class FockTarget:
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ConfigError("Fock occupation must be nonnegative")


@dataclass(frozen=True)
class ProductTarget:
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        for f in self.factors:
            if target_mode_count(f) != 1:
                raise ConfigError("Product factors must be one-mode targets")


@dataclass(frozen=True)
class MultiModeGaussianTarget:
    state: GaussianState


@dataclass(frozen=True)
class TmsvTarget:
    zeta: float


@dataclass(frozen=True)
class RandomFockTarget:
    """Normalized random Fock superposition, M in {1, 2}."""

    coeffs: np.ndarray  # complex (nc+1,) or (nc+1, nc+1)
    cutoff: int

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.ndim not in (1, 2) or any(d != self.cutoff + 1 for d in coeffs.shape):
            raise ConfigError("coeffs shape must be (cutoff+1,)*M with M in {1,2}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def M(self) -> int:
        return self.coeffs.ndim


TargetSpec = (OneModeGaussianTarget | FockTarget | ProductTarget
              | MultiModeGaussianTarget | TmsvTarget | RandomFockTarget)


def vacuum_target() -> OneModeGaussianTarget:
    return OneModeGaussianTarget(OneModeGaussianParams(0.0 + 0.0j, 0.0, 0.0))


def coherent_target(gamma: complex) -> OneModeGaussianTarget:
    return OneModeGaussianTarget(OneModeGaussianParams(complex(gamma), 0.0, 0.0))


def target_mode_count(t) -> int:
    if isinstance(t, (OneModeGaussianTarget, FockTarget)):
        return 1
    if isinstance(t, ProductTarget):
        return len(t.factors)
    if isinstance(t, MultiModeGaussianTarget):
        return t.state.mode_count
    if isinstance(t, TmsvTarget):
        return 2
    if isinstance(t, RandomFockTarget):
        return t.M
    raise ConfigError(f"not a TargetSpec: {t!r}")


def target_energy_per_mode(t) -> np.ndarray:
    """Photon number per mode of the target."""
    if isinstance(t, OneModeGaussianTarget):
        p = t.params
        return np.array([abs(p.gamma) ** 2 + np.sinh(p.zeta) ** 2])
    if isinstance(t, FockTarget):
        return np.array([float(t.n)])
    if isinstance(t, ProductTarget):
        return np.concatenate([target_energy_per_mode(f) for f in t.factors])
    if isinstance(t, MultiModeGaussianTarget):
        return t.state.energy_per_mode()
    if isinstance(t, TmsvTarget):
        return np.full(2, np.sinh(t.zeta) ** 2)
    if isinstance(t, RandomFockTarget):
        n = np.arange(t.cutoff + 1, dtype=float)
        prob = np.abs(t.coeffs) ** 2
        if t.M == 1:
            return np.array([float(prob @ n)])
        return np.array([float(np.sum(prob.sum(axis=1) * n)),
                         float(np.sum(prob.sum(axis=0) * n))])
    raise ConfigError(f"not a TargetSpec: {t!r}")


def as_gaussian(t) -> GaussianState | None:
    """GaussianState view of the target, or None for non-Gaussian families."""
    if isinstance(t, OneModeGaussianTarget):
        return one_mode_gaussian(t.params)
    if isinstance(t, MultiModeGaussianTarget):
        return t.state
    if isinstance(t, TmsvTarget):
        return tmsv(t.zeta)
    if isinstance(t, ProductTarget):
        parts = [as_gaussian(f) for f in t.factors]
        if any(p is None for p in parts):
            return None
        M = len(parts)
        mean = np.concatenate([p.mean for p in parts])
        cov = np.zeros((2 * M, 2 * M))
        for j, p in enumerate(parts):
            cov[2 * j:2 * j + 2, 2 * j:2 * j + 2] = p.cov
        return GaussianState(M, mean, cov)
    return None


# ---------------------------------------------------------------------------
# Fock expansions


@dataclass(frozen=True)
class FockExpansion:
    """Truncated Fock coefficients b_n of a target; leak = 1 - ||b||^2."""

    M: int
    cutoff: int
    coeffs: np.ndarray
    leak: float

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.shape != (self.cutoff + 1,) * self.M:
            raise ConfigError("coeffs shape must be (cutoff+1,)*M")
        object.__setattr__(self, "coeffs", coeffs)
        if self.leak < -1e-12 or np.sum(np.abs(coeffs) ** 2) > 1.0 + 1e-10:
            raise ConfigError("expansion is not subnormalized")

    def to_json(self) -> str:
        return json.dumps({
            "M": self.M,
            "cutoff": self.cutoff,
            "leak": self.leak,
            "coeffs_re": np.real(self.coeffs).tolist(),
            "coeffs_im": np.imag(self.coeffs).tolist(),
        })

    @staticmethod
    def from_json(s: str) -> "FockExpansion":
        d = json.loads(s)
        coeffs = np.asarray(d["coeffs_re"]) + 1j * np.asarray(d["coeffs_im"])
        return FockExpansion(d["M"], d["cutoff"], coeffs, d["leak"])


def squeezed_coherent_coeffs(gamma: complex, tau: float, zeta: float,
                             cutoff: int) -> np.ndarray:
    """Fock coefficients of D(gamma) R(tau) S(zeta) |0>.

    Since R(tau)|0> = |0>, the state equals D(gamma) S(z) |0> with
    complex squeezing z = zeta e^{-2i tau}; the coefficients obey
    mu sqrt(n+1) c_{n+1} + nu sqrt(n) c_{n-1} = (mu gamma + nu conj(gamma)) c_n
    with mu = cosh(zeta), nu = e^{-2i tau} sinh(zeta).
    """
    mu = np.cosh(zeta)
    nu = np.exp(-2j * tau) * np.sinh(zeta)
    c = np.zeros(cutoff + 1, dtype=complex)
    c[0] = (1.0 / np.sqrt(mu)) * np.exp(-0.5 * abs(gamma) ** 2
                                        - (nu / (2.0 * mu)) * np.conj(gamma) ** 2)
    rhs = mu * gamma + nu * np.conj(gamma)
    for n in range(cutoff):
        prev = c[n - 1] if n >= 1 else 0.0
        c[n + 1] = (rhs * c[n] - nu * np.sqrt(n) * prev) / (mu * np.sqrt(n + 1.0))
    return c


def fock_expand(target, cutoff: int | None = None,
                leak_bound: float | None = None) -> FockExpansion:
    """Truncated Fock expansion of a target state."""
    if isinstance(target, FockExpansion):
        if cutoff is not None and cutoff != target.cutoff:
            return _pad_expansion(target, cutoff)
        return target

    if isinstance(target, RandomFockTarget):
        exp = FockExpansion(target.M, target.cutoff, target.coeffs, 0.0)
        if cutoff is not None and cutoff != target.cutoff:
            exp = _pad_expansion(exp, cutoff)
        return exp

    if cutoff is None:
        raise ConfigError("cutoff required for analytic target expansions")
    if cutoff < 1:
        raise ConfigError("cutoff must be >= 1")

    if isinstance(target, FockTarget):
        if target.n > cutoff:
            raise AccuracyError(f"Fock({target.n}) does not fit cutoff {cutoff}")
        c = np.zeros(cutoff + 1, dtype=complex)
        c[target.n] = 1.0
        exp = FockExpansion(1, cutoff, c, 0.0)
    elif isinstance(target, OneModeGaussianTarget):
        p = target.params
        c = squeezed_coherent_coeffs(p.gamma, p.tau, p.zeta, cutoff)
        exp = FockExpansion(1, cutoff, c, max(1.0 - float(np.sum(np.abs(c) ** 2)), 0.0))
    elif isinstance(target, TmsvTarget):
        n = np.arange(cutoff + 1)
        lam = np.tanh(target.zeta) ** n / np.cosh(target.zeta)
        c = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
        np.fill_diagonal(c, lam)
        exp = FockExpansion(2, cutoff, c, max(1.0 - float(np.sum(lam ** 2)), 0.0))
    elif isinstance(target, ProductTarget):
        parts = [fock_expand(f, cutoff) for f in target.factors]
        if len(parts) == 1:
            exp = parts[0]
        elif len(parts) == 2:
            c = np.einsum("i,j->ij", parts[0].coeffs, parts[1].coeffs)
            exp = FockExpansion(2, cutoff, c,
                                max(1.0 - float(np.sum(np.abs(c) ** 2)), 0.0))
        else:
            raise ConfigError("Fock expansions support M <= 2")
    else:
        raise ConfigError(f"no Fock expansion for target {target!r}")

    if leak_bound is not None and exp.leak > leak_bound:
        raise AccuracyError(
            f"expansion leak {exp.leak:.3e} exceeds bound {leak_bound:.3e}")
    return exp


def auto_expand(target, leak_bound: float = 1e-12, start: int = 32,
                max_cutoff: int = 4096) -> FockExpansion:
    """Expand at the smallest power-of-two-scaled cutoff meeting leak_bound."""
    if isinstance(target, FockExpansion):
        return target
    cutoff = start
    while True:
        exp = fock_expand(target, cutoff)
        if exp.leak <= leak_bound:
            return exp
        if cutoff >= max_cutoff:
            raise AccuracyError(
                f"leak {exp.leak:.3e} still above {leak_bound:.3e} at cutoff {cutoff}")
        cutoff = min(2 * cutoff, max_cutoff)


def _pad_expansion(exp: FockExpansion, cutoff: int) -> FockExpansion:
    if cutoff < exp.cutoff:
        raise ConfigError("cannot shrink an expansion; rebuild at lower cutoff")
    shape = (cutoff + 1,) * exp.M
    c = np.zeros(shape, dtype=complex)
    c[tuple(slice(0, exp.cutoff + 1) for _ in range(exp.M))] = exp.coeffs
    return FockExpansion(exp.M, cutoff, c, exp.leak)


# ---------------------------------------------------------------------------
# Coherent overlaps (vectorized; the Monte Carlo integrand substrate)


def coherent_overlap_sq(target, alphas: np.ndarray) -> np.ndarray:
    """|<target|alpha>|^2 for a batch of coherent vectors alphas (..., M)."""
    alphas = np.asarray(alphas, dtype=complex)
    if isinstance(target, FockTarget):
        a2 = np.abs(alphas[..., 0]) ** 2
        logp = -a2 + target.n * np.log(np.where(a2 > 0, a2, 1.0)) - gammaln(target.n + 1)
        out = np.exp(logp)
        if target.n > 0:
            out = np.where(a2 > 0, out, 0.0)
        return out
    if isinstance(target, RandomFockTarget):
        from .circuits import coherent_fock_matrix
        flat = alphas.reshape(-1, alphas.shape[-1])
        if target.M == 1:
            col = coherent_fock_matrix(flat[:, 0], target.cutoff)
            amp = col @ np.conj(target.coeffs)
        else:
            col1 = coherent_fock_matrix(flat[:, 0], target.cutoff)
            col2 = coherent_fock_matrix(flat[:, 1], target.cutoff)
            amp = np.einsum("bn,nm,bm->b", col1, np.conj(target.coeffs), col2,
                            optimize=True)
        return (np.abs(amp) ** 2).reshape(alphas.shape[:-1])
    if isinstance(target, ProductTarget):
        out = np.ones(alphas.shape[:-1])
        for j, f in enumerate(target.factors):
            out = out * coherent_overlap_sq(f, alphas[..., j:j + 1])
        return out
    g = as_gaussian(target)
    if g is None:
        raise ConfigError(f"no coherent-overlap rule for target {target!r}")
    return coherent_fidelity(g, alphas)


# ---------------------------------------------------------------------------
# Random targets


def sample_random_target(M: int, E_t: float, epsilon: float,
                         cutoff: int | None = None, rng=None,
                         max_rejects: int = 100_000,
                         window_mode: str = "mean") -> RandomFockTarget:
    """Random normalized Fock superposition with b_n ~ complex normal
    (variance 2), rejection-sampled until the energy lies in
    [E_t - epsilon, E_t + epsilon].

    For M=2 the window applies to the mean of the per-mode energies by
    default; window_mode="both" requires each mode separately in window.
    """
    if M not in (1, 2):
        raise ConfigError("random targets support M in {1, 2}")
    if epsilon <= 0:
        raise ConfigError("epsilon must be > 0")
    if cutoff is None:
        cutoff = max(1, int(np.ceil(2.0 * E_t)))
    if E_t >= cutoff:
        raise ConfigError("E_t must be below the cutoff")
    if window_mode not in ("mean", "both"):
        raise ConfigError("window_mode must be 'mean' or 'both'")
    rng = as_rng(rng)
    shape = (cutoff + 1,) * M
    for _ in range(max_rejects):
        b = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        b /= np.linalg.norm(b)
        t = RandomFockTarget(b, cutoff)
        e = target_energy_per_mode(t)
        if window_mode == "mean":
            ok = abs(float(e.mean()) - E_t) <= epsilon
        else:
            ok = bool(np.all(np.abs(e - E_t) <= epsilon))
        if ok:
            return t
    raise AccuracyError(
        f"no sample inside energy window after {max_rejects} rejections")
