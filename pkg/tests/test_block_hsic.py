import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hsicinf.block_hsic import hsic_vector, partition_blocks, within_block_hsic
from hsicinf.errors import DataError, InsufficientSamplesError
from hsicinf.kernel import KernelSpec, gram_matrix

from oracles import hsic_ustat_oracle

G1 = KernelSpec.gaussian(1.0)


def random_grams(rng, B):
    x = rng.standard_normal(B)
    y = rng.standard_normal((B, 2))
    K = gram_matrix(x, KernelSpec.gaussian(rng.uniform(0.3, 2.0)))
    L = gram_matrix(y, KernelSpec.gaussian(rng.uniform(0.3, 2.0)))
    return K, L


def test_partition_sequential():
    p = partition_blocks(10, 5)
    assert p.blocks.tolist() == [[0, 1, 2, 3, 4], [5, 6, 7, 8, 9]]


def test_partition_discards_tail():
    p = partition_blocks(13, 5)
    assert p.nblocks == 2 and p.n_used == 10


def test_partition_random_is_seeded_and_disjoint():
    a = partition_blocks(23, 4, order=7)
    b = partition_blocks(23, 4, order=7)
    assert np.array_equal(a.blocks, b.blocks)
    flat = a.blocks.ravel()
    assert len(set(flat.tolist())) == flat.size == 20


@pytest.mark.parametrize("n, B, exc", [(10, 3, DataError), (3, 4, InsufficientSamplesError)])
def test_partition_errors(n, B, exc):
    with pytest.raises(exc):
        partition_blocks(n, B)


def test_constant_input_gives_zero():
    rng = np.random.default_rng(0)
    for B in (4, 6, 10):
        _, L = random_grams(rng, B)
        assert within_block_hsic(np.ones((B, B)), L) == 0.0
        assert hsic_ustat_oracle(np.ones((B, B)), L) == pytest.approx(0.0, abs=1e-15)


def test_diagonal_only_gram_gives_zero():
    assert within_block_hsic(np.eye(6), np.eye(6)) == 0.0


@pytest.mark.parametrize("B", [4, 5, 6, 8])
def test_matches_ustat_oracle(B):
    rng = np.random.default_rng(B)
    for _ in range(20):
        K, L = random_grams(rng, B)
        assert within_block_hsic(K, L) == pytest.approx(hsic_ustat_oracle(K, L), abs=1e-10)


def test_size_errors():
    with pytest.raises(DataError):
        within_block_hsic(np.eye(5), np.eye(6))
    with pytest.raises(DataError):
        within_block_hsic(np.eye(3), np.eye(3))


@settings(max_examples=50, deadline=None)
@given(st.integers(4, 9), st.integers(0, 2**32 - 1))
def test_symmetric_in_arguments(B, seed):
    K, L = random_grams(np.random.default_rng(seed), B)
    assert within_block_hsic(K, L) == pytest.approx(within_block_hsic(L, K), abs=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.integers(4, 9), st.integers(0, 2**32 - 1))
def test_invariant_to_permuting_block(B, seed):
    rng = np.random.default_rng(seed)
    K, L = random_grams(rng, B)
    p = rng.permutation(B)
    a = within_block_hsic(K, L)
    b = within_block_hsic(K[np.ix_(p, p)], L[np.ix_(p, p)])
    assert a == pytest.approx(b, abs=1e-14)


def test_single_block_equals_full_sample_estimate():
    rng = np.random.default_rng(11)
    X = rng.standard_normal((12, 3))
    y = rng.standard_normal(12)
    z, stats = hsic_vector(X, y, G1, G1, partition_blocks(12, 12))
    L = gram_matrix(y, G1)
    for m in range(3):
        assert z[m] == pytest.approx(within_block_hsic(gram_matrix(X[:, m], G1), L), abs=1e-15)


def test_scores_are_block_means_and_blocks_are_local():
    rng = np.random.default_rng(12)
    X = rng.standard_normal((40, 4))
    y = rng.standard_normal(40)
    part = partition_blocks(40, 10, order=3)
    z, stats = hsic_vector(X, y, G1, G1, part)
    assert stats.eta.shape == (4, 4)
    assert np.array_equal(z, stats.eta.mean(axis=0))
    # eta of block 0 only depends on block 0
    others = part.blocks[1:].ravel()
    X2, y2 = X.copy(), y.copy()
    X2[others] = rng.standard_normal((others.size, 4))
    y2[others] = rng.standard_normal(others.size)
    _, stats2 = hsic_vector(X2, y2, G1, G1, part)
    assert np.array_equal(stats2.eta[0], stats.eta[0])
    assert not np.array_equal(stats2.eta[1], stats.eta[1])
    # each eta entry matches the single-block computation
    for b, idx in enumerate(part.blocks):
        L = gram_matrix(y[idx], G1)
        for m in range(4):
            assert stats.eta[b, m] == pytest.approx(within_block_hsic(gram_matrix(X[idx, m], G1), L), abs=1e-15)


def test_constant_feature_scores_exactly_zero():
    rng = np.random.default_rng(13)
    X = rng.standard_normal((30, 3))
    X[:, 1] = 4.2
    z, stats = hsic_vector(X, rng.standard_normal(30), G1, G1, partition_blocks(30, 10))
    assert z[1] == 0.0 and np.all(stats.eta[:, 1] == 0.0)


def test_identical_response_regression_value():
    x = np.random.default_rng(0).standard_normal((40, 1))
    z, _ = hsic_vector(x, x[:, 0], G1, G1, partition_blocks(40, 10))
    assert z[0] > 0
    assert z[0] == pytest.approx(0.04550465832504865, rel=1e-12)


def test_unbiased_under_independence():
    rng = np.random.default_rng(2024)
    reps = 2000
    zs = np.empty(reps)
    part = partition_blocks(200, 10)
    for r in range(reps):
        z, _ = hsic_vector(rng.standard_normal((200, 1)), rng.standard_normal(200), G1, G1, part)
        zs[r] = z[0]
    se = zs.std(ddof=1) / np.sqrt(reps)
    assert abs(zs.mean()) < 3 * se


def test_feature_chunking_does_not_change_results(monkeypatch):
    import hsicinf.block_hsic as bh

    rng = np.random.default_rng(5)
    X = rng.standard_normal((50, 7))
    y = rng.integers(1, 4, size=50)
    part = partition_blocks(50, 5, order=1)
    spec_y = KernelSpec.delta(3)
    z, _ = hsic_vector(X, y, G1, spec_y, part)
    monkeypatch.setattr(bh, "_CHUNK_ENTRIES", 10 * 25 * 2)
    z2, _ = hsic_vector(X, y, G1, spec_y, part)
    assert np.allclose(z, z2, rtol=0, atol=1e-15)


def test_sample_count_mismatch():
    with pytest.raises(DataError):
        hsic_vector(np.zeros((20, 2)), np.zeros(19), G1, G1, partition_blocks(20, 5))
