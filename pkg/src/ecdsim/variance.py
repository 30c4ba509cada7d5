"""Gradient statistics: parameter-shift gradients, Monte Carlo variance,
analytic bounds, the shallow-regime formula and crossover thresholds.

The cost is C = |<0_q, psi | U |0>|^2; gradients are w.r.t. rotation
angles theta_k via the exact shift rule (C(theta_k + pi/2) -
C(theta_k - pi/2))/2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .circuits import (CircuitParams, EnsembleSpec, cost_branch, run_circuit,
                       sample_circuit)
from .correlators import c1_closed, c2_closed, hyp2f1_eta
from .errors import CapacityError, ConfigError
from .fock import cost_fock, default_cutoff, run_circuit_fock
from .streams import substream
from .targets import FockTarget, auto_expand, fock_expand, target_mode_count


@dataclass(frozen=True)
class VarianceEstimate:
    mean: float
    variance: float
    se_mean: float
    se_variance: float
    samples: int
    k: int


@dataclass(frozen=True)
class BoundsResult:
    lower: float
    upper: float
    c1: float
    c2_min: float
    c2_max: float
    argmin_z: np.ndarray
    argmax_z: np.ndarray


def default_k(M: int, L: int) -> int:
    """Parameter index used by the figures: k = ceil(ML/2) (1-based)."""
    return (M * L + 1) // 2


def evaluate_cost(p: CircuitParams, target, backend: str = "branch",
                  cutoff: int | None = None, expansion=None,
                  leak_bound: float = 1e-8) -> float:
    """Cost of a circuit against a target on the chosen backend."""
    if backend == "branch":
        state = run_circuit(p)
        if expansion is None:
            expansion = (fock_expand(target, cutoff) if cutoff is not None
                         else auto_expand(target))
        return cost_branch(state, expansion, leak_bound=leak_bound)
    if backend == "fock":
        if cutoff is None:
            raise ConfigError("fock backend requires a cutoff")
        state = run_circuit_fock(p, cutoff)
        exp = expansion if expansion is not None else fock_expand(target, cutoff)
        return cost_fock(state, exp)
    raise ConfigError("backend must be 'branch' or 'fock'")


def parameter_shift_gradient(p: CircuitParams, target, k: int,
                             backend: str = "branch",
                             cutoff: int | None = None,
                             expansion=None) -> float:
    """d C / d theta_k (k is 1-based, 1 <= k <= ML) via the shift rule."""
    n = p.M * p.L
    if not 1 <= k <= n:
        raise ConfigError(f"k must lie in [1, {n}]")
    idx = k - 1
    th = p.thetas[idx]
    cp = evaluate_cost(p.with_theta(idx, th + np.pi / 2.0), target,
                       backend, cutoff, expansion)
    cm = evaluate_cost(p.with_theta(idx, th - np.pi / 2.0), target,
                       backend, cutoff, expansion)
    return (cp - cm) / 2.0


def mc_gradient_variance(spec: EnsembleSpec, target, k: int | None = None,
                         N: int = 1000, backend: str = "branch",
                         seed: int = 0, cutoff: int | None = None,
                         expansion_cutoff: int | None = None,
                         n_bootstrap: int = 200) -> VarianceEstimate:
    """Sample N circuits from the ensemble, return gradient mean/variance
    with bootstrap standard errors. Sample i always uses the RNG
    substream (seed, i), so batching does not change the result."""
    if N < 30:
        raise ConfigError("N must be >= 30")
    if k is None:
        k = default_k(spec.M, spec.L)
    if backend == "fock" and cutoff is None:
        cutoff = default_cutoff(spec.E)
    if backend == "fock":
        expansion = fock_expand(target, cutoff)
    elif expansion_cutoff is not None:
        expansion = fock_expand(target, expansion_cutoff)
    else:
        expansion = auto_expand(target)
    grads = np.empty(N)
    for i in range(N):
        p = sample_circuit(spec, substream(seed, i))
        grads[i] = parameter_shift_gradient(p, target, k, backend, cutoff,
                                            expansion)
    mean = float(grads.mean())
    variance = float(grads.var(ddof=1))
    boot_rng = substream(seed, N, 0xB007)
    idx = boot_rng.integers(0, N, size=(n_bootstrap, N))
    resampled = grads[idx]
    se_mean = float(resampled.mean(axis=1).std(ddof=1))
    se_var = float(resampled.var(axis=1, ddof=1).std(ddof=1))
    return VarianceEstimate(mean, variance, se_mean, se_var, N, k)


def shallow_variance(M: int, L: int, target, E: float) -> float:
    """Shallow-regime variance (1/6) (3/4)^{ML} C1(target, E)."""
    return (1.0 / 6.0) * (3.0 / 4.0) ** (M * L) * c1_closed(target, E)


def variance_bounds(M: int, L: int, target, E: float,
                    scan_budget: int = 1 << 20) -> BoundsResult:
    """Asymptotic lower/upper variance bounds.

    lower = 1/2 [3^{ML-1}/4^{ML} C1 + (1/4 - 3^{ML}/4^{ML}) min_l C2(l/L)]
    upper = 1/2 [3^{ML-1}/4^{ML} C1 + (1/4 + 2^{ML-1}/4^{ML}) max_l C2(l/L)]
    with l scanned exhaustively over {1..L-1}^M. For Fock targets the
    minimum uses the eta lower factor and the maximum uses eta = 1.
    """
    if L < 2:
        raise ConfigError("bounds require L >= 2")
    if target_mode_count(target) != M:
        raise ConfigError("target mode count differs from M")
    if (L - 1) ** M > scan_budget:
        raise CapacityError(f"(L-1)^M = {(L-1)**M} exceeds scan budget")
    c1 = c1_closed(target, E)
    c2_min = np.inf
    c2_max = -np.inf
    argmin = argmax = None
    for ell in itertools.product(range(1, L), repeat=M):
        zv = np.asarray(ell, dtype=float) / L
        lo = c2_closed(target, E, zv, eta_mode="lower")
        hi = c2_closed(target, E, zv, eta_mode="upper")
        if lo < c2_min:
            c2_min, argmin = lo, zv
        if hi > c2_max:
            c2_max, argmax = hi, zv
    n = M * L
    c1_coef = 3.0 ** (n - 1) / 4.0 ** n
    lower = 0.5 * (c1_coef * c1 + (0.25 - 3.0 ** n / 4.0 ** n) * c2_min)
    upper = 0.5 * (c1_coef * c1 + (0.25 + 2.0 ** (n - 1) / 4.0 ** n) * c2_max)
    return BoundsResult(lower, upper, c1, c2_min, c2_max, argmin, argmax)


def _crossover_constant(target) -> float:
    if isinstance(target, FockTarget):
        return hyp2f1_eta(target.n) * (1.0 + 2.0 * target.n)
    return 1.0


def critical_energy(L: float, target) -> float:
    """Crossover energy E_c(L) = c_t (3/2) (4/3)^L separating the shallow
    1/E^M and deep 1/E^{2M} regimes (order-one constant fixed to 1)."""
    return _crossover_constant(target) * 1.5 * (4.0 / 3.0) ** L


def critical_depth(E: float, target) -> float:
    """Inverse of critical_energy: depth at which E becomes critical."""
    c = _crossover_constant(target) * 1.5
    if not E > 0:
        raise ConfigError("E must be > 0")
    return float(np.log(E / c) / np.log(4.0 / 3.0))
