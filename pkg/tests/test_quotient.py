import numpy as np
import pytest

from hsmetric.metric import quotient_metric

from helpers import chain_enumeration, random_dyadic_table


def test_metric_is_unchanged():
    F = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 1.5], [2.0, 1.5, 0.0]])
    assert np.array_equal(quotient_metric("abc", F), F)


def test_two_hop_chain():
    F = np.array([[0.0, 1.0, 10.0], [1.0, 0.0, 1.0], [10.0, 1.0, 0.0]])
    d = quotient_metric(["a", "b", "c"], F)
    assert d[0, 2] == 2.0 and d[2, 0] == 2.0


def test_callable_table():
    pts = [0.0, 1.0, 3.0]
    d = quotient_metric(pts, lambda p, q: (p - q) ** 2)
    assert d[0, 2] == 5.0


def test_chain_length_limit():
    F = np.array([[0, 1, 9, 9], [1, 0, 1, 9], [9, 1, 0, 1], [9, 9, 1, 0]], dtype=float)
    assert quotient_metric(range(4), F, chain_length=1)[0, 3] == 9.0
    assert quotient_metric(range(4), F, chain_length=2)[0, 3] == 9.0
    assert quotient_metric(range(4), F, chain_length=3)[0, 3] == 3.0


@pytest.mark.parametrize("bad", [
    [[0.0, 1.0], [2.0, 0.0]],
    [[0.0, -1.0], [-1.0, 0.0]],
    [[1.0, 1.0], [1.0, 0.0]],
])
def test_rejects_bad_tables(bad):
    with pytest.raises(ValueError):
        quotient_metric([0, 1], bad)


def test_shape_mismatch():
    with pytest.raises(ValueError):
        quotient_metric([0, 1, 2], np.zeros((2, 2)))


@pytest.mark.parametrize("seed", range(20))
def test_against_chain_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    T = random_dyadic_table(rng, n)
    d = quotient_metric(list(range(n)), T)
    assert np.array_equal(d, chain_enumeration(T))
    for i in range(n):
        for j in range(n):
            assert np.all(d[i, j] <= d[i, :] + d[:, j])
