import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from circlet._rng import PortableRNG


def test_same_seed_same_stream():
    a, b = PortableRNG(7), PortableRNG(7)
    assert np.array_equal(a.uniform(100), b.uniform(100))
    assert np.array_equal(a.normal(50), b.normal(50))


def test_uniform_is_top_53_bits_of_pcg64():
    raw = np.random.PCG64(3).random_raw(5)
    expected = (raw >> np.uint64(11)).astype(float) / 2.0 ** 53
    assert np.array_equal(PortableRNG(3).uniform(5), expected)


def test_normal_moments():
    z = PortableRNG(0).normal(20000)
    assert abs(z.mean()) < 0.03
    assert abs(z.std() - 1.0) < 0.03


@given(st.integers(0, 2**32 - 1), st.integers(1, 60), st.data())
@settings(max_examples=50, deadline=None)
def test_sample_without_replacement_distinct(seed, n, data):
    k = data.draw(st.integers(0, n))
    s = PortableRNG(seed).sample_without_replacement(n, k)
    assert len(s) == k
    assert len(set(s.tolist())) == k
    assert np.all((0 <= s) & (s < n))


def test_sample_rejects_oversize():
    with pytest.raises(ValueError):
        PortableRNG(0).sample_without_replacement(3, 4)
