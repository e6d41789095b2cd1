"""Top-k marginal screening as a polyhedral selection event.

Keeping the ``k`` largest scores is the event ``z[m] >= z[l]`` for every
selected ``m`` and unselected ``l``: ``k * (d - k)`` linear inequalities
``A z <= 0``. For a test of a single selected score ``z[m]`` the conditional
law of ``z[m]`` given this event is a normal truncated to ``[lower, upper]``;
the interval has a closed form in terms of column ``m`` of the covariance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import DataError, InfeasibleConstraintError, NumericalError
from .gaussian_model import ScoreDistribution


@dataclass(frozen=True)
class ScreeningResult:
    """Outcome of top-k screening.

    ``selected`` is ordered by decreasing score, ``unselected`` likewise.
    Indices are 0-based.
    """

    selected: np.ndarray
    unselected: np.ndarray
    z: np.ndarray

    @property
    def k(self) -> int:
        return self.selected.size

    @property
    def kbar(self) -> int:
        return self.unselected.size


@dataclass(frozen=True)
class TruncationInterval:
    lower: float
    upper: float


def select_top_k(z, k: int) -> ScreeningResult:
    """Indices of the ``k`` largest scores; ties go to the smaller index."""
    z = np.asarray(z, dtype=float)
    if z.ndim != 1:
        raise DataError(f"scores must be a vector, got shape {z.shape}")
    d = z.size
    if not 1 <= k < d:
        raise DataError(f"need 1 <= k < d, got k={k}, d={d}")
    if np.any(np.isnan(z)):
        raise DataError("scores contain NaN")
    order = np.argsort(-z, kind="stable")
    return ScreeningResult(selected=order[:k].copy(), unselected=order[k:].copy(), z=z.copy())


def constraint_index_maps(theta: int, k: int, kbar: int) -> Tuple[int, int]:
    """Positions (in ``selected``, ``unselected``) of constraint ``theta``.

    0-based: constraint ``theta`` compares selected position ``theta // kbar``
    with unselected position ``theta % kbar``, so ``theta = 0..k*kbar-1``
    enumerates every pair exactly once.
    """
    if not 0 <= theta < k * kbar:
        raise DataError(f"constraint index {theta} outside 0..{k * kbar - 1}")
    return theta // kbar, theta % kbar


def selection_constraints(screening: ScreeningResult) -> np.ndarray:
    """The matrix ``A`` with rows ``e_l - e_m`` so that the event is ``A z <= 0``.

    Row ``theta`` corresponds to ``constraint_index_maps(theta, k, kbar)``.
    """
    k, kbar = screening.k, screening.kbar
    A = np.zeros((k * kbar, screening.z.size))
    rows = np.arange(k * kbar)
    m_pos, l_pos = np.divmod(rows, kbar)
    A[rows, screening.unselected[l_pos]] = 1.0
    A[rows, screening.selected[m_pos]] = -1.0
    return A


def truncation_interval(m: int, screening: ScreeningResult, dist: ScoreDistribution) -> TruncationInterval:
    """Truncation interval for the score of selected feature ``m``.

    Each constraint ``z[mt] >= z[l]`` with ``g = Sigma[l, m] - Sigma[mt, m]``
    bounds ``z[m]`` at ``Sigma[m, m] * (z[mt] - z[l]) / g + z[m]``: from below
    when ``g < 0`` and from above when ``g > 0``. Constraints with ``g == 0``
    do not involve ``z[m]`` and only have to hold at the observed scores.

    The bound is evaluated as ``(w[mt] - w[l]) / (c[l] - c[mt])`` with
    ``c = Sigma[:, m] / Sigma[m, m]`` and ``w = z - c * z[m]``, which is the
    same number but exact when Sigma is diagonal (``V-`` is then the largest
    unselected score to the last bit).
    """
    m = int(m)
    if m not in set(screening.selected.tolist()):
        raise DataError(f"feature {m} was not selected")
    sigma = np.asarray(dist.sigma, dtype=float)
    z = screening.z
    var_m = sigma[m, m]
    if not var_m > 0.0:
        raise NumericalError(f"variance of feature {m} is {var_m}; covariance is singular")

    c = sigma[:, m] / var_m
    w = z - c * z[m]
    mt = np.repeat(screening.selected, screening.kbar)
    ell = np.tile(screening.unselected, screening.k)
    g = c[ell] - c[mt]
    gap = w[mt] - w[ell]

    flat = g == 0.0
    if np.any(gap[flat] < 0.0):
        raise InfeasibleConstraintError(
            f"selection constraint violated at observed scores for feature {m}"
        )
    neg = g < 0.0
    pos = g > 0.0
    lower = -math.inf
    upper = math.inf
    if np.any(neg):
        lower = float(np.max(gap[neg] / g[neg]))
    if np.any(pos):
        upper = float(np.min(gap[pos] / g[pos]))
    return TruncationInterval(lower=float(lower), upper=float(upper))
