"""Kernel-based post-selection inference with block HSIC.

Typical use::

    from hsicinf import PipelineConfig, run, synthdata

    data = synthdata.generate("linear", n=3000, seed=1)
    report = run(data, PipelineConfig(k=10, block_size=10))
"""
from .block_hsic import BlockPartition, BlockStatistics, hsic_vector, partition_blocks, within_block_hsic
from .dataset import Dataset, read_csv, write_csv
from .errors import (
    DataError,
    DegenerateCovarianceError,
    HSICInfError,
    InfeasibleConstraintError,
    InsufficientSamplesError,
    NumericalError,
    PrecisionError,
)
from .gaussian_model import ScoreDistribution, estimate_covariance
from .kernel import KernelSpec, gram_matrix, median_heuristic, one_hot_encode
from .pipeline import (
    FeatureResult,
    InferenceReport,
    PipelineConfig,
    evaluate_report,
    run,
    run_hsic_inf,
    run_split,
    standardize_features,
)
from .selection_event import (
    ScreeningResult,
    TruncationInterval,
    constraint_index_maps,
    select_top_k,
    truncation_interval,
)
from .truncated_normal import selective_p_value, trunc_norm_cdf

__version__ = "0.1.0"

__all__ = [
    "BlockPartition", "BlockStatistics", "hsic_vector", "partition_blocks", "within_block_hsic",
    "Dataset", "read_csv", "write_csv",
    "DataError", "DegenerateCovarianceError", "HSICInfError", "InfeasibleConstraintError",
    "InsufficientSamplesError", "NumericalError", "PrecisionError",
    "ScoreDistribution", "estimate_covariance",
    "KernelSpec", "gram_matrix", "median_heuristic", "one_hot_encode",
    "FeatureResult", "InferenceReport", "PipelineConfig", "evaluate_report", "run", "run_hsic_inf",
    "run_split", "standardize_features",
    "ScreeningResult", "TruncationInterval", "constraint_index_maps", "select_top_k", "truncation_interval",
    "selective_p_value", "trunc_norm_cdf",
]
