"""End-to-end inference: ``hsicInf``, the unadjusted ``hsicNaive`` and ``split``.

``hsicInf`` and ``hsicNaive`` shuffle the samples once and cut them into a
covariance split (``n // 3`` samples) and an inference split (the rest). The
block HSIC covariance is estimated on the first split; scores, top-k
selection and tests use the second. ``hsicInf`` conditions each test on the
selection event, ``hsicNaive`` ignores it.

``split`` uses three disjoint thirds: covariance, selection, and fresh scores
for testing. Selection is then independent of the tested scores, so plain
normal p-values are valid.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from .block_hsic import hsic_vector, partition_blocks
from .dataset import CLASSIFICATION, MULTIVARIATE, Dataset
from .errors import DataError, InsufficientSamplesError
from .gaussian_model import DEFAULT_SHRINKAGE, estimate_covariance
from .kernel import KernelSpec, median_heuristic
from .selection_event import select_top_k, truncation_interval
from .truncated_normal import selective_p_value

logger = logging.getLogger(__name__)

HSIC_INF = "hsicInf"
HSIC_NAIVE = "hsicNaive"
SPLIT = "split"
METHODS = (HSIC_INF, HSIC_NAIVE, SPLIT)
_ALIASES = {"hsic": HSIC_NAIVE, "hsicinf": HSIC_INF, "hsicnaive": HSIC_NAIVE, "naive": HSIC_NAIVE}


def canonical_method(name: str) -> str:
    if name in METHODS:
        return name
    try:
        return _ALIASES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown method {name!r}; expected one of {', '.join(METHODS)}") from None


@dataclass(frozen=True)
class PipelineConfig:
    """Run settings. ``spec_y=None`` picks the response kernel from the data:
    Gaussian with bandwidth 1 for a scalar response, Gaussian with the median
    heuristic for a vector response, delta for class labels."""

    k: int = 10
    block_size: int = 10
    alpha: float = 0.05
    shrinkage: float = DEFAULT_SHRINKAGE
    spec_x: KernelSpec = field(default_factory=lambda: KernelSpec.gaussian(1.0))
    spec_y: Optional[KernelSpec] = None
    method: str = HSIC_INF
    seed: int = 0
    standardize: bool = True

    def __post_init__(self):
        object.__setattr__(self, "method", canonical_method(self.method))
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.block_size < 4:
            raise ValueError(f"block size must be >= 4, got {self.block_size}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0.0 <= self.shrinkage < 1.0:
            raise ValueError(f"shrinkage must lie in [0, 1), got {self.shrinkage}")


@dataclass(frozen=True)
class FeatureResult:
    index: int
    name: str
    hsic: float
    variance: float
    v_lower: float
    v_upper: float
    p_value: float
    reject: bool


@dataclass(frozen=True)
class InferenceReport:
    """One row per selected feature, in decreasing order of selection score."""

    rows: Tuple[FeatureResult, ...]
    method: str
    k: int
    block_size: int
    alpha: float
    seed: int
    n_samples: Dict[str, int]
    kernel_x: str
    kernel_y: str
    warnings: Tuple[str, ...] = ()

    @property
    def selected(self) -> List[int]:
        return [r.index for r in self.rows]

    @property
    def p_values(self) -> np.ndarray:
        return np.array([r.p_value for r in self.rows])

    @property
    def rejected(self) -> List[int]:
        return [r.index for r in self.rows if r.reject]


def standardize_features(X) -> Tuple[np.ndarray, List[int]]:
    """Center each column and scale it to unit sample standard deviation.

    Constant columns are returned unchanged; their indices come back as the
    second element so callers can report them.
    """
    X = np.asarray(X, dtype=float)
    mean = X.mean(axis=0)
    sd = X.std(axis=0, ddof=1) if X.shape[0] > 1 else np.zeros(X.shape[1])
    constant = np.flatnonzero(~(sd > 0.0))
    out = X.copy()
    ok = sd > 0.0
    out[:, ok] = (X[:, ok] - mean[ok]) / sd[ok]
    return out, constant.tolist()


def default_response_kernel(data: Dataset) -> KernelSpec:
    if data.response == CLASSIFICATION:
        return KernelSpec.delta(data.num_classes)
    if data.response == MULTIVARIATE:
        return KernelSpec.gaussian(median_heuristic(data.y))
    return KernelSpec.gaussian(1.0)


def _prepare(data: Dataset, cfg: PipelineConfig):
    if not 1 <= cfg.k < data.d:
        raise DataError(f"need 1 <= k < d, got k={cfg.k}, d={data.d}")
    notes = []
    X = data.X
    if cfg.standardize:
        X, constant = standardize_features(X)
        for j in constant:
            notes.append(f"feature {j} ({data.feature_names[j]}) is constant; left unscaled")
    for msg in notes:
        warnings.warn(msg, RuntimeWarning, stacklevel=3)
    spec_y = cfg.spec_y if cfg.spec_y is not None else default_response_kernel(data)
    perm = np.random.default_rng(cfg.seed).permutation(data.n)
    return X, spec_y, perm, notes


def _block_scores(X, Y, idx, cfg: PipelineConfig, spec_y: KernelSpec, role: str):
    if idx.size < cfg.block_size:
        raise InsufficientSamplesError(
            f"{role} split has {idx.size} samples, fewer than one block of {cfg.block_size}"
        )
    part = partition_blocks(idx.size, cfg.block_size)
    return hsic_vector(X[idx], Y[idx], cfg.spec_x, spec_y, part)


def _covariance(X, Y, idx, cfg, spec_y, target_nblocks):
    if idx.size < 2 * cfg.block_size:
        raise InsufficientSamplesError(
            f"covariance split has {idx.size} samples; need at least two blocks of {cfg.block_size}"
        )
    _, stats = _block_scores(X, Y, idx, cfg, spec_y, "covariance")
    return estimate_covariance(stats, cfg.shrinkage, target_nblocks=target_nblocks)


def _report(data, cfg, spec_y, rows, sizes, notes) -> InferenceReport:
    return InferenceReport(
        rows=tuple(rows),
        method=cfg.method,
        k=cfg.k,
        block_size=cfg.block_size,
        alpha=cfg.alpha,
        seed=cfg.seed,
        n_samples=sizes,
        kernel_x=str(cfg.spec_x),
        kernel_y=str(spec_y),
        warnings=tuple(notes),
    )


def _row(data, cfg, m, score, variance, lower, upper) -> FeatureResult:
    p = selective_p_value(score, variance, lower, upper)
    return FeatureResult(
        index=int(m),
        name=data.feature_names[m],
        hsic=float(score),
        variance=float(variance),
        v_lower=float(lower),
        v_upper=float(upper),
        p_value=float(p),
        reject=bool(p < cfg.alpha),
    )


def run_hsic_inf(data: Dataset, cfg: PipelineConfig) -> InferenceReport:
    """Selective (``hsicInf``) or unadjusted (``hsicNaive``) inference.

    Both methods make identical random choices for a given seed, so they
    select the same features and differ only in the truncation interval.
    """
    if cfg.method == SPLIT:
        raise ValueError("use run_split for the split method")
    X, spec_y, perm, notes = _prepare(data, cfg)
    n_cov = data.n // 3
    cov_idx, inf_idx = perm[:n_cov], perm[n_cov:]

    z, stats = _block_scores(X, data.y, inf_idx, cfg, spec_y, "inference")
    dist = _covariance(X, data.y, cov_idx, cfg, spec_y, stats.nblocks)
    screening = select_top_k(z, cfg.k)

    rows = []
    for m in screening.selected:
        if cfg.method == HSIC_INF:
            iv = truncation_interval(m, screening, dist)
            lower, upper = iv.lower, iv.upper
        else:
            lower, upper = -math.inf, math.inf
        rows.append(_row(data, cfg, m, z[m], dist.sigma[m, m], lower, upper))
    sizes = {"covariance": int(cov_idx.size), "inference": int(inf_idx.size)}
    logger.debug("%s: selected %s", cfg.method, screening.selected.tolist())
    return _report(data, cfg, spec_y, rows, sizes, notes)


def run_split(data: Dataset, cfg: PipelineConfig) -> InferenceReport:
    """Data-splitting baseline: covariance, selection and testing on separate thirds."""
    cfg = replace(cfg, method=SPLIT)
    X, spec_y, perm, notes = _prepare(data, cfg)
    third = data.n // 3
    cov_idx = perm[:third]
    sel_idx = perm[third : 2 * third]
    test_idx = perm[2 * third :]

    z_sel, _ = _block_scores(X, data.y, sel_idx, cfg, spec_y, "selection")
    z_test, stats_test = _block_scores(X, data.y, test_idx, cfg, spec_y, "test")
    dist = _covariance(X, data.y, cov_idx, cfg, spec_y, stats_test.nblocks)
    screening = select_top_k(z_sel, cfg.k)

    rows = [
        _row(data, cfg, m, z_test[m], dist.sigma[m, m], -math.inf, math.inf)
        for m in screening.selected
    ]
    sizes = {"covariance": int(cov_idx.size), "selection": int(sel_idx.size), "test": int(test_idx.size)}
    return _report(data, cfg, spec_y, rows, sizes, notes)


def run(data: Dataset, cfg: PipelineConfig) -> InferenceReport:
    if cfg.method == SPLIT:
        return run_split(data, cfg)
    return run_hsic_inf(data, cfg)


def evaluate_report(report: InferenceReport, true_relevant) -> Tuple[float, float]:
    """True and false positive rates of a report against known relevant features.

    TPR is the share of relevant features rejected (0 when none are relevant);
    FPR is the number of irrelevant rejections divided by ``k``.
    """
    relevant = set(int(i) for i in true_relevant)
    rejected = set(report.rejected)
    tpr = len(rejected & relevant) / len(relevant) if relevant else 0.0
    fpr = len(rejected - relevant) / report.k
    return tpr, fpr
