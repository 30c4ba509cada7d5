import numpy as np
import pytest

from ecdsim import (GaussianState, OneModeGaussianParams, coherent_fidelity,
                    fidelity_pure, haar_unitary, one_mode_gaussian,
                    random_distributed_squeezed, tmsv)
from ecdsim.errors import ConfigError
from ecdsim.gaussian import passive_symplectic, symplectic_form


def test_vacuum_state():
    vac = one_mode_gaussian(OneModeGaussianParams(0.0, 0.0, 0.0))
    assert np.allclose(vac.mean, 0.0)
    assert np.allclose(vac.cov, np.eye(2))
    assert np.allclose(vac.energy_per_mode(), 0.0)


def test_energy_per_mode():
    g, z = 0.7 - 0.4j, 0.9
    state = one_mode_gaussian(OneModeGaussianParams(g, 0.3, z))
    assert np.allclose(state.energy_per_mode(), abs(g) ** 2 + np.sinh(z) ** 2)
    assert np.allclose(tmsv(z).energy_per_mode(), np.sinh(z) ** 2)


def test_rotation_leaves_energy_invariant():
    for tau in (0.0, 0.4, 1.3):
        state = one_mode_gaussian(OneModeGaussianParams(0.0, tau, 0.8))
        assert np.isclose(np.trace(state.cov), 2.0 * np.cosh(1.6))
        assert np.isclose(np.linalg.det(state.cov), 1.0)


def test_gaussian_state_validation():
    with pytest.raises(ConfigError):
        GaussianState(1, np.zeros(3), np.eye(2))
    with pytest.raises(ConfigError):
        GaussianState(1, np.zeros(2), np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_fidelity_self_is_one():
    state = one_mode_gaussian(OneModeGaussianParams(1.0 + 0.5j, 0.2, 0.7))
    assert np.isclose(fidelity_pure(state, state), 1.0)


def test_fidelity_coherent_pair():
    a, b = 0.8 + 0.3j, -0.2 + 1.1j
    sa = one_mode_gaussian(OneModeGaussianParams(a, 0.0, 0.0))
    sb = one_mode_gaussian(OneModeGaussianParams(b, 0.0, 0.0))
    assert np.isclose(fidelity_pure(sa, sb), np.exp(-abs(a - b) ** 2))


def test_coherent_fidelity_matches_fidelity_pure():
    state = one_mode_gaussian(OneModeGaussianParams(0.6, 0.5, 1.1))
    alphas = np.array([[0.3 - 0.2j], [1.4 + 0.1j], [0.0]])
    batch = coherent_fidelity(state, alphas)
    for i, al in enumerate(alphas[:, 0]):
        coh = one_mode_gaussian(OneModeGaussianParams(al, 0.0, 0.0))
        assert np.isclose(batch[i], fidelity_pure(state, coh), rtol=1e-12)


def test_coherent_fidelity_lemma():
    # One-mode closed form: F = sech(z) exp(-(1+k1) dx^2 - (1-k1) dy^2
    # + 2 k2 dx dy) with k1 = cos(2 tau) tanh z, k2 = sin(2 tau) tanh z,
    # dx + i dy = alpha - gamma.
    g, tau, z = 0.4 + 0.9j, 0.7, 0.8
    state = one_mode_gaussian(OneModeGaussianParams(g, tau, z))
    rng = np.random.default_rng(3)
    al = rng.standard_normal() + 1j * rng.standard_normal()
    dx, dy = (al - g).real, (al - g).imag
    k1 = np.cos(2 * tau) * np.tanh(z)
    k2 = np.sin(2 * tau) * np.tanh(z)
    lemma = (np.exp(-(1 + k1) * dx ** 2 - (1 - k1) * dy ** 2 + 2 * k2 * dx * dy)
             / np.cosh(z))
    assert np.isclose(coherent_fidelity(state, np.array([[al]]))[0], lemma,
                      rtol=1e-12)


def test_haar_unitary_and_passive_symplectic(rng):
    u = haar_unitary(4, rng)
    assert np.allclose(u @ u.conj().T, np.eye(4), atol=1e-12)
    O = passive_symplectic(u)
    assert np.allclose(O @ O.T, np.eye(8), atol=1e-12)
    W = symplectic_form(4)
    assert np.allclose(O @ W @ O.T, W, atol=1e-12)


def test_random_distributed_squeezed_pure_and_seeded():
    state = random_distributed_squeezed(3, 1.2, seed=5)
    again = random_distributed_squeezed(3, 1.2, seed=5)
    assert np.allclose(state.cov, again.cov)
    assert np.isclose(np.linalg.det(state.cov), 1.0)
    W = symplectic_form(3)
    # purity: (V W)^2 = -I for a pure Gaussian state
    VW = state.cov @ W
    assert np.allclose(VW @ VW, -np.eye(6), atol=1e-10)
    assert np.isclose(state.energy_per_mode().sum(), np.sinh(1.2) ** 2)
