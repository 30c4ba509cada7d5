"""Fast self-check battery behind the `validate` CLI subcommand.

Each check exercises one cross-implementation invariant (closed form vs
simulation, analytic vs Monte Carlo, dual evaluation paths) at small
sizes so the whole battery runs in seconds. The full statistical
reproduction lives in the test suite, not here.
"""

from __future__ import annotations

import io
import tempfile

import numpy as np
from scipy.special import gammaln

from .circuits import (EnsembleSpec, branch_sign_vectors, closed_form_weight,
                       branch_phase, run_circuit, sample_circuit, state_energy)
from .correlators import c1_closed, c2_closed, c3_closed_gaussian, mc_correlator
from .fock import displacement_matrix
from .gaussian import OneModeGaussianParams, coherent_fidelity, one_mode_gaussian
from .streams import substream
from .targets import (OneModeGaussianTarget, TmsvTarget, auto_expand,
                      coherent_target, vacuum_target)
from .variance import (evaluate_cost, mc_gradient_variance,
                       parameter_shift_gradient, shallow_variance)


def check_displacement_unitarity():
    for beta in (0.4, 1.3 - 0.8j):
        d = displacement_matrix(beta, 40).entries
        m = np.arange(41)
        col0 = np.exp(-0.5 * abs(beta) ** 2 + m * np.log(abs(beta))
                      - 0.5 * gammaln(m + 1) + 1j * m * np.angle(beta))
        assert np.abs(d[:, 0] - col0).max() < 1e-12
        lead = d[:, :9]
        assert np.abs(lead.conj().T @ lead - np.eye(9)).max() < 1e-9
    return "leading displacement-matrix columns orthonormal, column 0 exact"


def check_backend_equivalence():
    rng = substream(2024, 1)
    worst = 0.0
    target = coherent_target(0.6 + 0.2j)
    for _ in range(3):
        p = sample_circuit(EnsembleSpec(1, 4, 2.0), rng)
        cb = evaluate_cost(p, target, "branch")
        cf = evaluate_cost(p, target, "fock", cutoff=48)
        worst = max(worst, abs(cb - cf))
    assert worst < 1e-8, worst
    return f"branch and Fock backends agree to {worst:.1e}"


def check_closed_form_weights():
    rng = substream(2024, 2)
    worst = 0.0
    for _ in range(3):
        p = sample_circuit(EnsembleSpec(1, 4, 1.5), rng)
        state = run_circuit(p)
        s = branch_sign_vectors(state, p.L)
        for i in range(state.branch_count):
            w = closed_form_weight(s[i], int(state.a[i]), p.thetas, p.phis)
            w *= np.exp(1j * branch_phase(s[i], p.betas[:, 0]))
            worst = max(worst, abs(state.v[i] - w))
    assert worst < 1e-10, worst
    return f"sequential branch weights match the closed form to {worst:.1e}"


def check_ensemble_energy():
    spec = EnsembleSpec(1, 4, 8.0)
    rng = substream(2024, 3)
    vals = [state_energy(run_circuit(sample_circuit(spec, rng)))[0]
            for _ in range(800)]
    mean, se = np.mean(vals), np.std(vals, ddof=1) / np.sqrt(len(vals))
    assert abs(mean - spec.E) < 5 * se, (mean, se)
    return f"ensemble energy {mean:.2f} matches E={spec.E} within 5 SE"


def check_depth_one_variance():
    E = 3.0
    exact = 1.0 / (8.0 * (1.0 + 2.0 * E))
    assert abs(shallow_variance(1, 1, vacuum_target(), E) - exact) < 1e-14
    est = mc_gradient_variance(EnsembleSpec(1, 1, E), vacuum_target(),
                               N=3000, seed=7)
    assert abs(est.variance - exact) < 5 * est.se_variance, est
    return "depth-1 vacuum variance matches 1/(8(1+2E)) exactly and by MC"


def check_correlator_oracles():
    dsv = OneModeGaussianTarget(OneModeGaussianParams(1.0, 0.3, 0.8))
    for kind, closed, kwargs in (
            ("c1", c1_closed(dsv, 6.0), {}),
            ("c2", c2_closed(dsv, 6.0, 0.4), {"z": 0.4}),
            ("c3", c3_closed_gaussian(dsv, 6.0, 0.3, 0.4),
             {"z": 0.3, "z_tilde": 0.4})):
        est = mc_correlator(kind, dsv, 6.0, N=40000, seed=11, **kwargs)
        assert abs(est.value - closed) < 5 * est.std_error, (kind, est, closed)
    tm = TmsvTarget(0.7)
    est = mc_correlator("c2", tm, 5.0, z=np.array([0.3, 0.6]), N=40000, seed=12)
    closed = c2_closed(tm, 5.0, np.array([0.3, 0.6]))
    assert abs(est.value - closed) < 5 * est.std_error
    return "C1/C2/C3 Monte Carlo agrees with every closed form within 5 SE"


def check_parameter_shift():
    rng = substream(2024, 4)
    target = coherent_target(0.5)
    worst = 0.0
    for _ in range(5):
        p = sample_circuit(EnsembleSpec(1, 3, 2.0), rng)
        k = int(rng.integers(1, 4))
        g = parameter_shift_gradient(p, target, k)
        h = 1e-5
        idx = k - 1
        fd = (evaluate_cost(p.with_theta(idx, p.thetas[idx] + h), target)
              - evaluate_cost(p.with_theta(idx, p.thetas[idx] - h), target)) / (2 * h)
        worst = max(worst, abs(g - fd))
    assert worst < 1e-6, worst
    return f"parameter-shift gradients match finite differences to {worst:.1e}"


def check_fidelity_dual_path():
    dsv = OneModeGaussianTarget(OneModeGaussianParams(0.7 + 0.2j, 0.4, 0.9))
    exp = auto_expand(dsv)
    alphas = np.array([[0.3 - 0.5j], [1.1]])
    via_cm = coherent_fidelity(one_mode_gaussian(dsv.params), alphas)
    n = np.arange(exp.cutoff + 1)
    worst = 0.0
    for i, al in enumerate(alphas[:, 0]):
        coh = np.exp(-0.5 * abs(al) ** 2) * al ** n / np.sqrt(
            np.exp(gammaln(n + 1)))
        via_fock = abs(np.vdot(exp.coeffs, coh)) ** 2
        worst = max(worst, abs(via_fock - via_cm[i]))
    assert worst < 1e-10, worst
    return f"covariance-matrix and Fock-expansion fidelities agree to {worst:.1e}"


def check_csv_round_trip():
    from .cli import read_table, write_table
    rows = [[1.0, np.pi], [2.0, 1.0 / 3.0]]
    with tempfile.NamedTemporaryFile("w", suffix=".csv", delete=False) as f:
        path = f.name
    write_table(path, ["a", "b"], rows, {"seed": 0})
    _, cols, back = read_table(path)
    assert cols == ["a", "b"]
    assert back == rows
    return "CSV output round-trips losslessly"


CHECKS = (
    check_displacement_unitarity,
    check_backend_equivalence,
    check_closed_form_weights,
    check_ensemble_energy,
    check_depth_one_variance,
    check_correlator_oracles,
    check_parameter_shift,
    check_fidelity_dual_path,
    check_csv_round_trip,
)


def run_checks(verbose: bool = False) -> int:
    """Run every check; returns the number of failures."""
    failures = 0
    for check in CHECKS:
        name = check.__name__.removeprefix("check_")
        try:
            detail = check()
            if verbose:
                print(f"PASS {name}: {detail}")
        except AssertionError as exc:
            failures += 1
            if verbose:
                print(f"FAIL {name}: {exc}")
    return failures
