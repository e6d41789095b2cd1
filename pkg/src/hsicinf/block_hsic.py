"""Unbiased block HSIC.

The sample is cut into disjoint blocks of ``B`` points. On each block the
unbiased HSIC U-statistic ``eta_b`` is computed, and the block HSIC score of a
feature is the mean of its ``eta_b``. All features share one partition so that
the per-block statistics can also be used to estimate the joint covariance of
the scores.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .errors import DataError, InsufficientSamplesError
from .kernel import DELTA, KernelSpec, block_grams, check_labels, feature_grams

MIN_BLOCK_SIZE = 4
# upper bound on Gram entries held in memory at once by hsic_vector
_CHUNK_ENTRIES = 1 << 22


@dataclass(frozen=True)
class BlockPartition:
    """Disjoint equal-size blocks of sample indices.

    ``blocks`` is an ``(nblocks, B)`` integer array; the trailing ``n mod B``
    samples of the (possibly shuffled) order are not used.
    """

    n: int
    block_size: int
    blocks: np.ndarray

    @property
    def nblocks(self) -> int:
        return self.blocks.shape[0]

    @property
    def n_used(self) -> int:
        return self.blocks.size


def partition_blocks(
    n: int,
    block_size: int,
    order: Union[None, int, np.random.Generator, np.ndarray] = None,
) -> BlockPartition:
    """Split ``range(n)`` into ``n // block_size`` blocks.

    ``order`` selects the sample order before chunking: ``None`` keeps the
    natural order, an int seed or a Generator draws a uniform permutation, and
    an explicit index array is used as given.
    """
    n = int(n)
    B = int(block_size)
    if B < MIN_BLOCK_SIZE:
        raise DataError(f"block size must be >= {MIN_BLOCK_SIZE}, got {B}")
    if n < B:
        raise InsufficientSamplesError(f"need at least one block: n={n} < B={B}")
    if order is None:
        idx = np.arange(n)
    elif isinstance(order, np.ndarray) and order.dtype.kind in "iu":
        idx = np.asarray(order, dtype=np.int64)
        if idx.shape != (n,) or not np.array_equal(np.sort(idx), np.arange(n)):
            raise DataError("explicit order must be a permutation of range(n)")
    else:
        idx = np.random.default_rng(order).permutation(n)
    nb = n // B
    blocks = idx[: nb * B].reshape(nb, B).copy()
    blocks.setflags(write=False)
    return BlockPartition(n=n, block_size=B, blocks=blocks)


def _drop_diagonal(G: np.ndarray) -> np.ndarray:
    """Zero the diagonal, then remove the mean off-diagonal value.

    The second step changes nothing mathematically (the estimator is invariant
    to adding a constant to every off-diagonal entry) but it makes a constant
    Gram matrix map to exactly zero and reduces cancellation.
    """
    B = G.shape[-1]
    off = 1.0 - np.eye(B)
    Gbar = G * off
    level = Gbar.sum(axis=(-2, -1), keepdims=True) / (B * (B - 1))
    return (Gbar - level) * off


def _eta(Kbar: np.ndarray, Lbar: np.ndarray) -> np.ndarray:
    """Within-block estimator for diagonal-free Grams.

    ``Kbar`` has shape ``(..., B, B)`` and ``Lbar`` broadcasts against it.
    """
    B = Kbar.shape[-1]
    trace = (Kbar * Lbar).sum(axis=(-2, -1))
    k_rows = Kbar.sum(axis=-1)
    l_rows = Lbar.sum(axis=-1)
    k_sum = k_rows.sum(axis=-1)
    l_sum = l_rows.sum(axis=-1)
    cross = (k_rows * l_rows).sum(axis=-1)
    return (trace + k_sum * l_sum / ((B - 1) * (B - 2)) - 2.0 / (B - 2) * cross) / (B * (B - 3))


def within_block_hsic(Kb, Lb) -> float:
    """Unbiased HSIC estimate from one block's input and output Gram matrices."""
    K = np.asarray(Kb, dtype=float)
    L = np.asarray(Lb, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape != L.shape:
        raise DataError(f"Gram matrices must be square and equal-sized, got {K.shape} and {L.shape}")
    if K.shape[0] < MIN_BLOCK_SIZE:
        raise DataError(f"block size must be >= {MIN_BLOCK_SIZE}, got {K.shape[0]}")
    return float(_eta(_drop_diagonal(K), _drop_diagonal(L)))


@dataclass(frozen=True)
class BlockStatistics:
    """Per-block estimators ``eta[b, m]`` and the partition they came from."""

    eta: np.ndarray
    partition: BlockPartition

    @property
    def nblocks(self) -> int:
        return self.eta.shape[0]

    @property
    def scores(self) -> np.ndarray:
        return self.eta.mean(axis=0)


def _response_blocks(Y: np.ndarray, spec_y: KernelSpec, blocks: np.ndarray) -> np.ndarray:
    if spec_y.kind == DELTA:
        lab = np.asarray(Y)
        if lab.ndim == 2 and lab.shape[1] == 1:
            lab = lab[:, 0]
        if lab.ndim == 1:
            lab = check_labels(lab, spec_y.num_classes)
        return block_grams(lab[blocks], spec_y)
    Yf = np.asarray(Y, dtype=float)
    if Yf.ndim == 1:
        Yf = Yf[:, None]
    return block_grams(Yf[blocks], spec_y)


def hsic_vector(
    X,
    Y,
    spec_x: KernelSpec,
    spec_y: KernelSpec,
    partition: BlockPartition,
) -> Tuple[np.ndarray, BlockStatistics]:
    """Block HSIC score of every feature column of ``X`` against ``Y``.

    Returns ``(z, stats)`` where ``z[m]`` is the mean over blocks of
    ``stats.eta[:, m]``. Output Gram matrices are built once per block and
    shared by all features.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DataError(f"X must be an n x d matrix, got shape {X.shape}")
    Y = np.asarray(Y)
    if X.shape[0] != partition.n or Y.shape[0] != partition.n:
        raise DataError(
            f"sample count mismatch: X has {X.shape[0]}, Y has {Y.shape[0]}, partition covers {partition.n}"
        )
    if not np.all(np.isfinite(X)):
        raise DataError("X contains non-finite values")
    blocks = partition.blocks
    nb, B = blocks.shape
    d = X.shape[1]
    Lbar = _drop_diagonal(_response_blocks(Y, spec_y, blocks))[:, None, :, :]
    Xb = X[blocks]  # (nb, B, d)
    eta = np.empty((nb, d))
    step = max(1, _CHUNK_ENTRIES // (nb * B * B))
    for lo in range(0, d, step):
        Kbar = _drop_diagonal(feature_grams(Xb[:, :, lo : lo + step], spec_x))
        eta[:, lo : lo + step] = _eta(Kbar, Lbar)
    stats = BlockStatistics(eta=eta, partition=partition)
    return stats.scores, stats
