"""Normal approximation of the block HSIC score vector.

The score of each feature is a mean of i.i.d. within-block estimators, so the
score vector is asymptotically normal with covariance ``Cov(eta) / nblocks``.
``Cov(eta)`` is estimated by the sample covariance of the block rows, shrunk
towards its diagonal to keep it positive definite when there are few blocks.

Note the scaling: a mean of ``n/B`` i.i.d. terms has variance
``Cov(eta) * B / n``, i.e. the block covariance is divided (not multiplied) by
the number of blocks.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .block_hsic import BlockStatistics
from .errors import DataError, DegenerateCovarianceError

DEFAULT_SHRINKAGE = 0.1


@dataclass(frozen=True)
class ScoreDistribution:
    mu: np.ndarray
    sigma: np.ndarray
    nblocks: int


def estimate_covariance(
    stats: BlockStatistics,
    shrinkage: float = DEFAULT_SHRINKAGE,
    target_nblocks: Optional[int] = None,
) -> ScoreDistribution:
    """Mean and covariance of the block HSIC score vector.

    Parameters
    ----------
    stats : BlockStatistics
        Within-block estimators, one row per block.
    shrinkage : float in [0, 1)
        Weight moved from the sample covariance onto its diagonal.
    target_nblocks : int, optional
        Number of blocks averaged in the score whose covariance is wanted.
        Defaults to the number of rows in ``stats``; pass the block count of a
        different split when the covariance is estimated on held-out data.

    Raises
    ------
    DegenerateCovarianceError
        If some feature has zero variance; diagonal shrinkage cannot repair
        that. The offending indices are listed in the exception. For
        ``shrinkage > 0`` and nonzero variances the result is positive
        definite; with ``shrinkage == 0`` it is only guaranteed semidefinite.
    """
    if not 0.0 <= shrinkage < 1.0:
        raise ValueError(f"shrinkage must lie in [0, 1), got {shrinkage}")
    eta = np.asarray(stats.eta, dtype=float)
    nb = eta.shape[0]
    if nb < 2:
        raise DataError(f"covariance estimation needs at least 2 blocks, got {nb}")
    scale = nb if target_nblocks is None else int(target_nblocks)
    if scale < 1:
        raise ValueError(f"target_nblocks must be positive, got {target_nblocks}")
    if not np.all(np.isfinite(eta)):
        raise DataError("block statistics contain non-finite values")

    mu = eta.mean(axis=0)
    centered = eta - mu
    S = centered.T @ centered / (nb - 1)
    S = 0.5 * (S + S.T)
    shrunk = (1.0 - shrinkage) * S
    shrunk[np.diag_indices_from(shrunk)] = np.diag(S)
    sigma = shrunk / scale

    zero_var = np.flatnonzero(np.diag(sigma) <= 0.0)
    if zero_var.size:
        raise DegenerateCovarianceError(
            f"zero-variance features {zero_var.tolist()}: score covariance is singular",
            zero_var,
        )
    return ScoreDistribution(mu=mu, sigma=sigma, nblocks=scale)
