import numpy as np
import pytest

from ecdsim import as_rng, substream


def test_substream_deterministic():
    a = substream(7, 1, 2).standard_normal(5)
    b = substream(7, 1, 2).standard_normal(5)
    assert np.array_equal(a, b)


def test_substream_keys_independent():
    a = substream(7, 0).standard_normal(5)
    b = substream(7, 1).standard_normal(5)
    assert not np.array_equal(a, b)


def test_substream_matches_seed_sequence():
    ref = np.random.Generator(np.random.PCG64(np.random.SeedSequence([7, 3])))
    assert np.array_equal(substream(7, 3).standard_normal(4),
                          ref.standard_normal(4))


def test_as_rng_passthrough():
    gen = substream(0)
    assert as_rng(gen) is gen
    assert isinstance(as_rng(5), np.random.Generator)
    a = as_rng(5).standard_normal(3)
    b = as_rng(5).standard_normal(3)
    assert np.array_equal(a, b)
