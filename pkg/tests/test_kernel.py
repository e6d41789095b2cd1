import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hsicinf.errors import DataError
from hsicinf.kernel import KernelSpec, block_grams, feature_grams, gram_matrix, median_heuristic, one_hot_encode


def test_single_point_gaussian():
    assert gram_matrix([[0.3, -1.0]], KernelSpec.gaussian(1.0)).tolist() == [[1.0]]


def test_gaussian_two_points():
    K = gram_matrix([0.0, 2.0], KernelSpec.gaussian(1.0))
    assert K[0, 1] == pytest.approx(math.exp(-2.0), abs=1e-15)
    assert K[0, 1] == pytest.approx(0.135335, abs=1e-6)
    assert K[1, 0] == K[0, 1]
    assert K[0, 0] == K[1, 1] == 1.0


def test_delta_labels():
    K = gram_matrix([1, 2, 1], KernelSpec.delta(3))
    assert K.tolist() == [[1, 0, 1], [0, 1, 0], [1, 0, 1]]


def test_delta_accepts_one_hot_rows():
    K = gram_matrix(one_hot_encode([1, 2, 1], 3), KernelSpec.delta(3))
    assert K.tolist() == [[1, 0, 1], [0, 1, 0], [1, 0, 1]]


def test_delta_rejects_out_of_range_label():
    with pytest.raises(DataError):
        gram_matrix([1, 4], KernelSpec.delta(3))
    with pytest.raises(DataError):
        gram_matrix([0, 1], KernelSpec.delta(3))


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_gaussian_bandwidth_must_be_positive_finite(bad):
    with pytest.raises(ValueError):
        KernelSpec.gaussian(bad)


def test_delta_needs_two_classes():
    with pytest.raises(ValueError):
        KernelSpec.delta(1)


def test_dimension_mismatch_rejected():
    with pytest.raises((DataError, ValueError)):
        gram_matrix([[0.0, 1.0], [1.0]], KernelSpec.gaussian(1.0))


def test_one_hot():
    assert one_hot_encode(2, 3).tolist() == [[0.0, 1.0, 0.0]]
    with pytest.raises(DataError):
        one_hot_encode(1, 1)
    with pytest.raises(DataError):
        one_hot_encode([4], 3)
    e = one_hot_encode([2, 3], 3)
    assert e[0] @ e[1] == 0.0


@pytest.mark.parametrize(
    "points, expected",
    [([0.0, 1.0], 1.0), ([0.0, 1.0, 3.0], 2.0), ([[0, 0], [3, 4]], 5.0), ([0.0, 1.0, 3.0, 7.0], 3.5)],
)
def test_median_heuristic(points, expected):
    # {0,1,3,7}: distances 1,2,3,4,6,7 -> mean of 3 and 4
    assert median_heuristic(points) == expected


def test_median_heuristic_degenerate():
    with pytest.raises(DataError):
        median_heuristic([5.0, 5.0, 5.0])
    with pytest.raises(DataError):
        median_heuristic([1.0])


finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(arrays(float, st.tuples(st.integers(1, 12), st.integers(1, 3)), elements=finite),
       st.floats(0.2, 5.0))
def test_gaussian_gram_symmetric_psd(P, tau):
    K = gram_matrix(P, KernelSpec.gaussian(tau))
    assert np.array_equal(K, K.T)
    assert np.all(np.diag(K) == 1.0)
    assert np.all((K > 0) | (K == 0)) and np.all(K <= 1.0)
    assert np.linalg.eigvalsh(K).min() > -1e-9


@settings(max_examples=40, deadline=None)
@given(arrays(float, st.tuples(st.integers(1, 10), st.integers(1, 3)), elements=finite))
def test_linear_gram_symmetric_psd(P):
    K = gram_matrix(P, KernelSpec.linear())
    assert np.array_equal(K, K.T)
    assert np.linalg.eigvalsh(K).min() > -1e-9 * max(1.0, np.abs(K).max())


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=15))
def test_delta_equals_linear_on_one_hot(labels):
    Kd = gram_matrix(labels, KernelSpec.delta(4))
    Kl = gram_matrix(one_hot_encode(labels, 4), KernelSpec.linear())
    assert np.array_equal(Kd, Kl)
    assert np.linalg.eigvalsh(Kd).min() > -1e-9


def test_gaussian_gram_permutation_equivariant():
    rng = np.random.default_rng(3)
    P = rng.standard_normal((9, 2))
    perm = rng.permutation(9)
    spec = KernelSpec.gaussian(0.7)
    K = gram_matrix(P, spec)
    assert np.allclose(gram_matrix(P[perm], spec), K[np.ix_(perm, perm)], rtol=0, atol=1e-15)


def test_batched_grams_match_single():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((3, 6, 4))  # 3 blocks, B=6, d=4
    spec = KernelSpec.gaussian(1.3)
    G = feature_grams(X, spec)
    for b in range(3):
        for m in range(4):
            assert np.allclose(G[b, m], gram_matrix(X[b, :, m], spec), atol=1e-15)
    Y = rng.standard_normal((3, 6, 2))
    H = block_grams(Y, spec)
    for b in range(3):
        assert np.allclose(H[b], gram_matrix(Y[b], spec), atol=1e-15)
    labels = rng.integers(1, 4, size=(3, 6))
    D = block_grams(labels, KernelSpec.delta(3))
    for b in range(3):
        assert np.array_equal(D[b], gram_matrix(labels[b], KernelSpec.delta(3)))
