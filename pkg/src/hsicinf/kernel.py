"""Kernels and Gram matrices for block HSIC.

Three kernels are supported: Gaussian ``exp(-|a - b|^2 / (2 tau^2))``, linear
``a . b`` and the delta kernel on class labels ``1{a == b}``. The delta kernel
on labels ``1..L`` coincides with the linear kernel on their one-hot codes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import pdist

from .errors import DataError

GAUSSIAN = "gaussian"
LINEAR = "linear"
DELTA = "delta"


@dataclass(frozen=True)
class KernelSpec:
    """Kernel choice plus its single parameter.

    Use the ``gaussian``, ``linear`` and ``delta`` constructors rather than
    building instances by hand.
    """

    kind: str
    bandwidth: Optional[float] = None
    num_classes: Optional[int] = None

    def __post_init__(self):
        if self.kind == GAUSSIAN:
            tau = self.bandwidth
            if tau is None or not math.isfinite(tau) or tau <= 0:
                raise ValueError(f"Gaussian bandwidth must be finite and > 0, got {tau!r}")
        elif self.kind == DELTA:
            if self.num_classes is None or int(self.num_classes) < 2:
                raise ValueError(f"delta kernel needs num_classes >= 2, got {self.num_classes!r}")
        elif self.kind != LINEAR:
            raise ValueError(f"unknown kernel kind {self.kind!r}")

    @classmethod
    def gaussian(cls, bandwidth: float) -> "KernelSpec":
        return cls(GAUSSIAN, bandwidth=float(bandwidth))

    @classmethod
    def linear(cls) -> "KernelSpec":
        return cls(LINEAR)

    @classmethod
    def delta(cls, num_classes: int) -> "KernelSpec":
        return cls(DELTA, num_classes=int(num_classes))

    def __str__(self):
        if self.kind == GAUSSIAN:
            return f"gaussian(tau={self.bandwidth:g})"
        if self.kind == DELTA:
            return f"delta(L={self.num_classes})"
        return "linear"


def _as_points(points) -> np.ndarray:
    P = np.asarray(points, dtype=float)
    if P.ndim == 0:
        P = P.reshape(1, 1)
    elif P.ndim == 1:
        P = P[:, None]
    elif P.ndim != 2:
        raise DataError(f"points must be a list of vectors, got array of shape {P.shape}")
    if P.shape[0] < 1:
        raise DataError("need at least one point")
    if not np.all(np.isfinite(P)):
        raise DataError("points contain non-finite values")
    return P


def check_labels(labels, num_classes: int) -> np.ndarray:
    """Validate integer class labels in ``1..num_classes``; return them as int64."""
    lab = np.asarray(labels)
    if lab.ndim != 1:
        raise DataError(f"labels must be one-dimensional, got shape {lab.shape}")
    if lab.dtype.kind == "f":
        if not np.all(np.isfinite(lab)) or np.any(lab != np.round(lab)):
            raise DataError("labels must be integers")
    elif lab.dtype.kind not in "iu":
        raise DataError(f"labels must be integers, got dtype {lab.dtype}")
    lab = lab.astype(np.int64)
    bad = (lab < 1) | (lab > num_classes)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise DataError(f"label {lab[i]} at position {i} outside 1..{num_classes}")
    return lab


def one_hot_encode(labels, num_classes: int) -> np.ndarray:
    """Map labels in ``1..L`` to rows of the ``L x L`` identity."""
    if int(num_classes) < 2:
        raise DataError(f"one-hot encoding needs at least 2 classes, got {num_classes}")
    lab = check_labels(np.atleast_1d(labels), int(num_classes))
    out = np.zeros((lab.size, int(num_classes)))
    out[np.arange(lab.size), lab - 1] = 1.0
    return out


def _labels_from_points(points, num_classes: int) -> np.ndarray:
    arr = np.asarray(points)
    if arr.ndim == 2 and arr.shape[1] == num_classes and num_classes > 1:
        # one-hot rows
        if not np.all((arr == 0) | (arr == 1)) or not np.all(arr.sum(axis=1) == 1):
            raise DataError("delta kernel expects one-hot rows or integer labels")
        return np.argmax(arr, axis=1).astype(np.int64) + 1
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    return check_labels(np.atleast_1d(arr), num_classes)


def gram_matrix(points, spec: KernelSpec) -> np.ndarray:
    """Gram matrix ``[K]_ij = kappa(p_i, p_j)`` for one set of points.

    Only the upper triangle is evaluated; the lower one is a mirror copy so the
    result is exactly symmetric.
    """
    if spec.kind == DELTA:
        lab = _labels_from_points(points, spec.num_classes)
        K = (lab[:, None] == lab[None, :]).astype(float)
    else:
        P = _as_points(points)
        if spec.kind == LINEAR:
            K = P @ P.T
        else:
            sq = ((P[:, None, :] - P[None, :, :]) ** 2).sum(axis=-1)
            K = np.exp(-sq / (2.0 * spec.bandwidth ** 2))
    upper = np.triu(K)
    return upper + np.triu(upper, 1).T


def block_grams(blocks: np.ndarray, spec: KernelSpec) -> np.ndarray:
    """Gram matrices for a stack of blocks.

    ``blocks`` has shape ``(nblocks, B)`` (scalar points or labels) or
    ``(nblocks, B, p)``; the result has shape ``(nblocks, B, B)``.
    """
    V = np.asarray(blocks)
    if spec.kind == DELTA:
        if V.ndim == 3:
            if V.shape[2] == 1:
                V = V[..., 0]
            else:
                V = np.argmax(V, axis=2) + 1
        return (V[:, :, None] == V[:, None, :]).astype(float)
    V = np.asarray(V, dtype=float)
    if V.ndim == 2:
        V = V[:, :, None]
    if spec.kind == LINEAR:
        return np.einsum("bip,bjp->bij", V, V)
    diff = V[:, :, None, :] - V[:, None, :, :]
    return np.exp(-(diff ** 2).sum(axis=-1) / (2.0 * spec.bandwidth ** 2))


def feature_grams(blocks: np.ndarray, spec: KernelSpec) -> np.ndarray:
    """Univariate Gram matrices, one per feature column.

    ``blocks`` has shape ``(nblocks, B, d)``; returns ``(nblocks, d, B, B)``
    where slice ``[b, m]`` is the Gram matrix of column ``m`` on block ``b``.
    """
    V = np.asarray(blocks, dtype=float)
    if spec.kind == DELTA:
        raise ValueError("delta kernel is for categorical responses, not input features")
    Vt = np.swapaxes(V, 1, 2)  # (nb, d, B)
    if spec.kind == LINEAR:
        return Vt[..., :, None] * Vt[..., None, :]
    diff = Vt[..., :, None] - Vt[..., None, :]
    return np.exp(-(diff * diff) / (2.0 * spec.bandwidth ** 2))


def median_heuristic(points) -> float:
    """Median pairwise Euclidean distance over unordered pairs ``i < j``."""
    P = _as_points(points)
    if P.shape[0] < 2:
        raise DataError("median heuristic needs at least two points")
    med = float(np.median(pdist(P)))
    if med <= 0.0:
        raise DataError("median pairwise distance is zero; bandwidth would be 0")
    return med
