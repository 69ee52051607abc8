import numpy as np
import pytest

from broadcast_aoi.channel import derive_generator, derive_stream, path_seed
from broadcast_aoi.model import ChannelParams


def test_same_seed_same_stream():
    ch = ChannelParams(0.6, 0.3)
    a = derive_stream(11, 4).take(1000, ch)
    b = derive_stream(11, 4).take(1000, ch)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_different_paths_differ():
    assert path_seed(11, 0) != path_seed(11, 1)
    u0 = derive_stream(11, 0).uniforms(8)
    u1 = derive_stream(11, 1).uniforms(8)
    assert not np.array_equal(u0, u1)


def test_single_and_bulk_draws_interleave():
    ch = ChannelParams(0.5, 0.5)
    bulk = derive_stream(3, 0).take(10_000, ch)
    s = derive_stream(3, 0)
    pieces = [s.next_pair(ch) for _ in range(5000)]
    v1, v2 = s.take(3000, ch)
    pieces += list(zip(v1, v2))
    pieces += [s.next_pair(ch) for _ in range(2000)]
    got = np.array(pieces)
    assert np.array_equal(got[:, 0], bulk[0]) and np.array_equal(got[:, 1], bulk[1])


def test_degenerate_probabilities():
    s = derive_stream(0, 0)
    assert all(s.next_pair(ChannelParams(1.0, 1.0)) == (1, 1) for _ in range(500))
    v1, _ = derive_stream(0, 1).take(500, ChannelParams(1.0, 0.3))
    assert v1.all()


def test_marginals_within_three_sigma():
    n = 10**6
    v1, v2 = derive_stream(5, 0).take(n, ChannelParams(0.7, 0.4))
    assert abs(v1.mean() - 0.7) <= 0.002
    assert abs(v2.mean() - 0.4) <= 3 * np.sqrt(0.24 / n)


def test_links_independent_within_slot():
    n = 10**5
    v1, v2 = derive_stream(5, 1).take(n, ChannelParams(0.7, 0.4))
    assert abs(np.corrcoef(v1, v2)[0, 1]) < 3 / np.sqrt(n)


def test_paths_uncorrelated():
    ch = ChannelParams(0.7, 0.4)
    a, _ = derive_stream(9, 0).take(10**5, ch)
    b, _ = derive_stream(9, 1).take(10**5, ch)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.02


def test_auxiliary_generator_does_not_touch_erasures():
    ch = ChannelParams(0.5, 0.5)
    g = derive_generator(2, 0, purpose=0)
    g.random(100)
    assert np.array_equal(derive_stream(2, 0).take(50, ch)[0], derive_stream(2, 0).take(50, ch)[0])
    assert not np.array_equal(derive_generator(2, 0, 0).random(4), derive_generator(2, 0, 1).random(4))
