"""Shared oracles for the test suite.

The displacement oracle pads the truncated generator before
exponentiating: the exponential of the unpadded truncated generator is
wrong near the truncation corner, so padding is required for the oracle
itself to be trustworthy.
"""

import numpy as np
import pytest
from scipy.linalg import expm


def displacement_oracle(beta: complex, cutoff: int, pad: int = 120) -> np.ndarray:
    """<m|D(beta)|n> on cutoff+1 levels via expm of a padded generator."""
    n = cutoff + 1 + pad
    a = np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)
    full = expm(beta * a.conj().T - np.conj(beta) * a)
    return full[:cutoff + 1, :cutoff + 1]


def coherent_vector(alpha: complex, cutoff: int) -> np.ndarray:
    """Fock coefficients of |alpha> up to the cutoff."""
    n = np.arange(cutoff + 1)
    from scipy.special import gammaln
    mag = np.exp(-0.5 * abs(alpha) ** 2 + n * np.log(abs(alpha) + (alpha == 0))
                 - 0.5 * gammaln(n + 1))
    if alpha == 0:
        out = np.zeros(cutoff + 1)
        out[0] = 1.0
        return out.astype(complex)
    return mag * np.exp(1j * n * np.angle(alpha))


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)
