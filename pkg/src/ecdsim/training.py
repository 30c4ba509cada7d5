"""Gradient-based training of ECD circuits for state preparation.

Rotation angles theta use the exact parameter-shift rule; phi and the
displacement components Re/Im beta use central finite differences (no
analytic shift rule is assumed for them). The initialization energy is
the knob behind the energy-matched training strategy.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .circuits import CircuitParams, EnsembleSpec, cost_branch, run_circuit, sample_circuit
from .errors import ConfigError, NumericalError
from .fock import cost_fock, default_cutoff, displacement_matrix, run_circuit_fock
from .streams import substream
from .targets import auto_expand, fock_expand, target_mode_count
from .variance import default_k


@dataclass(frozen=True)
class TrainConfig:
    spec: EnsembleSpec
    target: object
    steps: int
    optimizer: str = "adam"        # "adam" | "sgd"
    learning_rate: float = 0.01
    beta_fd_step: float = 1e-4
    phi_fd_step: float = 1e-4
    backend: str = "fock"
    cutoff: int | None = None
    seeds: tuple = (0,)
    freeze_beta: bool = False

    def __post_init__(self):
        if self.steps < 1:
            raise ConfigError("steps must be >= 1")
        if not self.learning_rate >= 0:
            raise ConfigError("learning_rate must be >= 0")
        if self.optimizer not in ("adam", "sgd"):
            raise ConfigError("optimizer must be 'adam' or 'sgd'")
        if self.backend not in ("branch", "fock"):
            raise ConfigError("backend must be 'branch' or 'fock'")


@dataclass(frozen=True)
class TrainHistory:
    seed: int
    infidelity: np.ndarray      # (steps+1,)
    state_energy: np.ndarray    # (steps+1, M)
    circuit_energy: np.ndarray  # (steps+1, M), sum_l |beta_lj|^2


class _Evaluator:
    """Cost/state evaluation with displacement-matrix reuse on the Fock
    backend: angle shifts rerun the circuit against cached matrices."""

    def __init__(self, cfg: TrainConfig):
        self.cfg = cfg
        self.M, self.L = cfg.spec.M, cfg.spec.L
        if cfg.backend == "fock":
            self.cutoff = cfg.cutoff if cfg.cutoff is not None else default_cutoff(cfg.spec.E)
            self.expansion = fock_expand(cfg.target, self.cutoff)
        else:
            self.cutoff = None
            self.expansion = auto_expand(cfg.target)

    def dmats(self, betas: np.ndarray) -> list | None:
        if self.cfg.backend != "fock":
            return None
        return [displacement_matrix(betas[t // self.M, t % self.M], self.cutoff).entries
                for t in range(self.M * self.L)]

    def cost(self, p: CircuitParams, dmats=None) -> float:
        if self.cfg.backend == "fock":
            state = run_circuit_fock(p, self.cutoff, dmats=dmats)
            return cost_fock(state, self.expansion)
        return cost_branch(run_circuit(p), self.expansion, leak_bound=np.inf)

    def cost_and_energy(self, p: CircuitParams, dmats=None):
        if self.cfg.backend == "fock":
            state = run_circuit_fock(p, self.cutoff, dmats=dmats)
            return cost_fock(state, self.expansion), state.energy_per_mode()
        state = run_circuit(p)
        from .circuits import state_energy
        return cost_branch(state, self.expansion, leak_bound=np.inf), state_energy(state)


def _gradient(ev: _Evaluator, p: CircuitParams, dmats) -> np.ndarray:
    """Gradient of the cost w.r.t. [thetas, phis, Re beta, Im beta]."""
    cfg = ev.cfg
    n = p.M * p.L
    g_theta = np.empty(n)
    g_phi = np.empty(n)
    for k in range(n):
        th = p.thetas[k]
        cp = ev.cost(p.with_theta(k, th + np.pi / 2.0), dmats)
        cm = ev.cost(p.with_theta(k, th - np.pi / 2.0), dmats)
        g_theta[k] = (cp - cm) / 2.0
    h = cfg.phi_fd_step
    for k in range(n):
        phis_p, phis_m = p.phis.copy(), p.phis.copy()
        phis_p[k] += h
        phis_m[k] -= h
        cp = ev.cost(CircuitParams(p.M, p.L, p.betas, p.thetas, phis_p), dmats)
        cm = ev.cost(CircuitParams(p.M, p.L, p.betas, p.thetas, phis_m), dmats)
        g_phi[k] = (cp - cm) / (2.0 * h)
    if cfg.freeze_beta:
        return np.concatenate([g_theta, g_phi, np.zeros(2 * p.L * p.M)])
    hb = cfg.beta_fd_step
    g_re = np.empty((p.L, p.M))
    g_im = np.empty((p.L, p.M))
    for l in range(p.L):
        for j in range(p.M):
            for which, g in (("re", g_re), ("im", g_im)):
                delta = hb if which == "re" else 1j * hb
                cs = []
                for sgn in (+1.0, -1.0):
                    betas = p.betas.copy()
                    betas[l, j] += sgn * delta
                    dm = dmats
                    if dm is not None:
                        dm = list(dmats)
                        t = l * p.M + j
                        dm[t] = displacement_matrix(betas[l, j], ev.cutoff).entries
                    cs.append(ev.cost(CircuitParams(p.M, p.L, betas, p.thetas, p.phis), dm))
                g[l, j] = (cs[0] - cs[1]) / (2.0 * hb)
    return np.concatenate([g_theta, g_phi, g_re.ravel(), g_im.ravel()])


def _train_one(cfg: TrainConfig, seed: int) -> TrainHistory:
    ev = _Evaluator(cfg)
    p = sample_circuit(cfg.spec, substream(seed))
    n = p.M * p.L
    dim = 2 * n + 2 * p.L * p.M
    m1 = np.zeros(dim)
    m2 = np.zeros(dim)
    eps = 1e-8
    infid = np.empty(cfg.steps + 1)
    s_energy = np.empty((cfg.steps + 1, p.M))
    c_energy = np.empty((cfg.steps + 1, p.M))

    def record(i, params):
        c, e = ev.cost_and_energy(params, ev.dmats(params.betas))
        if c > 1.0 + 1e-6 or not np.isfinite(c):
            raise NumericalError(f"cost {c} outside [0, 1] at step {i}")
        infid[i] = 1.0 - c
        s_energy[i] = e
        c_energy[i] = np.sum(np.abs(params.betas) ** 2, axis=0)

    record(0, p)
    for step in range(1, cfg.steps + 1):
        dmats = ev.dmats(p.betas)
        grad = -_gradient(ev, p, dmats)  # minimize infidelity
        if cfg.optimizer == "adam":
            m1 = 0.9 * m1 + 0.1 * grad
            m2 = 0.999 * m2 + 0.001 * grad * grad
            mhat = m1 / (1.0 - 0.9 ** step)
            vhat = m2 / (1.0 - 0.999 ** step)
            update = -cfg.learning_rate * mhat / (np.sqrt(vhat) + eps)
        else:
            update = -cfg.learning_rate * grad
        thetas = p.thetas + update[:n]
        phis = p.phis + update[n:2 * n]
        d_beta = update[2 * n:2 * n + p.L * p.M] + 1j * update[2 * n + p.L * p.M:]
        betas = p.betas + d_beta.reshape(p.L, p.M)
        p = CircuitParams(p.M, p.L, betas, thetas, phis)
        record(step, p)
    return TrainHistory(seed, infid, s_energy, c_energy)


def train(cfg: TrainConfig) -> list[TrainHistory]:
    """One history per seed, deterministic per seed."""
    if target_mode_count(cfg.target) != cfg.spec.M:
        raise ConfigError("target mode count differs from circuit mode count")
    return [_train_one(cfg, s) for s in cfg.seeds]


def mean_history(histories: list[TrainHistory]) -> TrainHistory:
    """Seed-averaged history (seed recorded as -1)."""
    return TrainHistory(
        -1,
        np.mean([h.infidelity for h in histories], axis=0),
        np.mean([h.state_energy for h in histories], axis=0),
        np.mean([h.circuit_energy for h in histories], axis=0),
    )


def histories_to_csv(histories: list[TrainHistory], path, metadata: dict | None = None):
    """Serialize per-seed histories: step, infidelity, state_energy_mode_j...,
    circuit_energy, seed. Metadata lines are '#'-prefixed."""
    M = histories[0].state_energy.shape[1]
    with open(path, "w", newline="") as f:
        for key, val in (metadata or {}).items():
            f.write(f"# {key} = {val}\n")
        writer = csv.writer(f)
        cols = (["step", "infidelity"]
                + [f"state_energy_mode_{j+1}" for j in range(M)]
                + ["circuit_energy", "seed"])
        writer.writerow(cols)
        for h in histories:
            for i in range(h.infidelity.shape[0]):
                row = ([i, repr(float(h.infidelity[i]))]
                       + [repr(float(x)) for x in h.state_energy[i]]
                       + [repr(float(h.circuit_energy[i].sum())), h.seed])
                writer.writerow(row)
