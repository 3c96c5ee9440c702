import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from bellsim import _rng

SEEDS = st.integers(0, 2**64 - 1)


def test_known_splitmix_value():
    # first output of the reference SplitMix64 generator seeded with 0
    assert int(_rng.mix(np.uint64(0))) == 0xE220A8397B1DCDAF


@given(SEEDS, st.integers(1, 50))
def test_uniforms_lie_in_unit_interval(seed, n):
    u = _rng.uniforms(_rng.stream_keys(seed, np.arange(20)), n)
    assert u.shape == (20, n)
    assert (u >= 0).all() and (u < 1).all()


@given(SEEDS, st.integers(0, 10**6), st.integers(1, 100))
def test_rows_depend_only_on_their_trial(seed, start, width):
    whole = _rng.uniforms(_rng.stream_keys(seed, np.arange(start, start + 30)), width)
    part = _rng.uniforms(_rng.stream_keys(seed, np.arange(start + 10, start + 20)), width)
    assert np.array_equal(whole[10:20], part)


def test_salts_separate_streams():
    t = np.arange(100)
    a = _rng.stream_keys(1, t, 7)
    assert not np.array_equal(a, _rng.stream_keys(1, t, 8))
    assert not np.array_equal(a, _rng.stream_keys(1, t))
    assert not np.array_equal(a, _rng.stream_keys(2, t, 7))


def test_roughly_uniform():
    u = _rng.uniforms(_rng.stream_keys(3, np.arange(20_000)), 5).reshape(-1)
    hist, _ = np.histogram(u, bins=10, range=(0, 1))
    expected = len(u) / 10
    chi2 = float(((hist - expected) ** 2 / expected).sum())
    # 9 degrees of freedom; the 99.99th percentile is about 33.7
    assert chi2 < 33.7
