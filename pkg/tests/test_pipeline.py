import math
import numpy as np
import pytest

from hsicinf import synthdata
from hsicinf.dataset import Dataset
from hsicinf.errors import DataError, DegenerateCovarianceError, InsufficientSamplesError
from hsicinf.kernel import KernelSpec
from hsicinf.pipeline import (
    HSIC_INF,
    HSIC_NAIVE,
    SPLIT,
    FeatureResult,
    InferenceReport,
    PipelineConfig,
    canonical_method,
    default_response_kernel,
    evaluate_report,
    run,
    run_split,
    standardize_features,
)

from oracles import (
    gaussian_gram_loops,
    hsic_ustat_oracle,
    polyhedral_interval,
    sample_covariance_loops,
    trunc_norm_cdf_quad,
)


def test_standardize_examples():
    X = np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]])
    out, constant = standardize_features(X)
    assert out[:, 0].mean() == pytest.approx(0.0, abs=1e-15)
    assert out[:, 0].std(ddof=1) == pytest.approx(1.0, abs=1e-15)
    assert constant == [1]
    assert np.array_equal(out[:, 1], X[:, 1])


def test_standardize_idempotent():
    X = np.random.default_rng(0).normal(3.0, 2.0, (50, 4))
    once, _ = standardize_features(X)
    twice, _ = standardize_features(once)
    np.testing.assert_allclose(twice, once, atol=1e-12, rtol=0)


def test_constant_feature_warns_then_fails_as_degenerate():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((60, 4))
    X[:, 2] = 5.0
    data = Dataset(X, rng.standard_normal(60))
    # the column survives standardization, but its block scores are all 0
    with pytest.warns(RuntimeWarning, match="x3"):
        with pytest.raises(DegenerateCovarianceError) as info:
            run(data, PipelineConfig(k=2, block_size=5))
    assert info.value.features == (2,) or list(info.value.features) == [2]


def _report(rejected_relevant, rejected_irrelevant, k=10):
    rows = [
        FeatureResult(i, f"x{i}", 0.0, 1.0, -math.inf, math.inf, 0.0 if i in rejected_relevant + rejected_irrelevant else 0.5,
                      i in rejected_relevant + rejected_irrelevant)
        for i in range(k)
    ]
    return InferenceReport(tuple(rows), HSIC_INF, k, 10, 0.05, 0, {}, "", "")


@pytest.mark.parametrize(
    "relevant_hits, irrelevant_hits, expected",
    [([0, 1, 2, 3, 4], [], (1.0, 0.0)), ([], [], (0.0, 0.0)), ([0, 1, 2], [7, 8], (0.6, 0.2))],
)
def test_evaluate_report(relevant_hits, irrelevant_hits, expected):
    assert evaluate_report(_report(relevant_hits, irrelevant_hits), range(5)) == pytest.approx(expected)


def test_canonical_method():
    assert canonical_method("hsic") == HSIC_NAIVE
    assert canonical_method("hsicInf") == HSIC_INF
    with pytest.raises(ValueError):
        canonical_method("lasso")


@pytest.mark.parametrize("kwargs", [dict(k=0), dict(block_size=3), dict(alpha=1.0), dict(shrinkage=1.0)])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        PipelineConfig(**kwargs)


def test_k_must_be_below_d():
    data = synthdata.generate("null", 60, 0)
    with pytest.raises(DataError):
        run(data, PipelineConfig(k=20, block_size=5))


def test_selective_and_naive_select_same_features():
    data = synthdata.generate("linear", 600, 4)
    a = run(data, PipelineConfig(method=HSIC_INF, seed=9))
    b = run(data, PipelineConfig(method=HSIC_NAIVE, seed=9))
    assert a.selected == b.selected
    assert [r.hsic for r in a.rows] == [r.hsic for r in b.rows]
    assert all(math.isinf(r.v_lower) and math.isinf(r.v_upper) for r in b.rows)
    assert all(r.v_lower <= r.hsic <= r.v_upper for r in a.rows)


@pytest.mark.parametrize("method", [HSIC_INF, HSIC_NAIVE, SPLIT])
def test_report_invariants_and_determinism(method):
    data = synthdata.generate("additive", 900, 2)
    cfg = PipelineConfig(method=method, seed=5)
    a, b = run(data, cfg), run(data, cfg)
    assert a == b
    assert len(a.rows) == 10
    for r in a.rows:
        assert 0.0 <= r.p_value <= 1.0
        assert r.reject == (r.p_value < cfg.alpha)


def test_split_sizes_and_fields():
    data = synthdata.generate("linear", 301, 0)
    report = run_split(data, PipelineConfig(seed=1))
    assert report.method == SPLIT
    assert report.n_samples == {"covariance": 100, "selection": 100, "test": 101}
    assert all(math.isinf(r.v_lower) and math.isinf(r.v_upper) for r in report.rows)


@pytest.mark.parametrize("method", [HSIC_INF, SPLIT])
def test_sample_size_boundaries(method):
    B = 5
    with pytest.raises(InsufficientSamplesError):
        run(synthdata.generate("null", 3 * B, 0), PipelineConfig(k=3, block_size=B, method=method))
    report = run(synthdata.generate("null", 6 * B, 0), PipelineConfig(k=3, block_size=B, method=method))
    assert len(report.rows) == 3


def test_multivariate_and_classification_runs():
    mv = synthdata.generate("multivariate", 600, 3)
    assert default_response_kernel(mv).kind == "gaussian"
    assert len(run(mv, PipelineConfig(seed=2)).rows) == 10
    tc = synthdata.generate("threeclass", 600, 3)
    assert default_response_kernel(tc) == KernelSpec.delta(3)
    report = run(tc, PipelineConfig(seed=2))
    assert set(report.selected[:2]) == {0, 1}


def _golden_trace(X, y, seed, B, k, shrinkage):
    """Every pipeline step redone with loops and the reference oracles."""
    n, d = X.shape
    Xs = np.empty_like(X)
    for j in range(d):
        col = X[:, j]
        mean = sum(col) / n
        sd = math.sqrt(sum((c - mean) ** 2 for c in col) / (n - 1))
        Xs[:, j] = (col - mean) / sd
    perm = np.random.default_rng(seed).permutation(n)
    cov_idx, inf_idx = perm[: n // 3], perm[n // 3 :]

    def block_etas(idx):
        rows = []
        for b in range(len(idx) // B):
            blk = idx[b * B : (b + 1) * B]
            L = gaussian_gram_loops(y[blk], 1.0)
            rows.append([hsic_ustat_oracle(gaussian_gram_loops(Xs[blk, j], 1.0), L) for j in range(d)])
        return np.array(rows)

    eta_inf = block_etas(inf_idx)
    z = eta_inf.mean(axis=0)
    S = sample_covariance_loops(block_etas(cov_idx))
    sigma = (1 - shrinkage) * S + shrinkage * np.diag(np.diag(S))
    sigma = sigma / eta_inf.shape[0]
    order = sorted(range(d), key=lambda j: (-z[j], j))
    selected, unselected = order[:k], order[k:]
    out = []
    for m in selected:
        lo, hi = polyhedral_interval(z, sigma, selected, unselected, m)
        p = 1.0 - trunc_norm_cdf_quad(z[m], 0.0, sigma[m, m], lo, hi)
        out.append((m, z[m], sigma[m, m], lo, hi, p))
    return out


def test_golden_trace_two_features():
    rng = np.random.default_rng(2024)
    n, B = 24, 4
    X = rng.standard_normal((n, 2))
    y = np.sin(2 * X[:, 0]) + 0.3 * rng.standard_normal(n)
    expected = _golden_trace(X, y, seed=11, B=B, k=1, shrinkage=0.1)
    report = run(Dataset(X, y), PipelineConfig(k=1, block_size=B, seed=11))
    assert report.n_samples == {"covariance": 8, "inference": 16}
    assert len(report.rows) == 1
    row = report.rows[0]
    m, score, var, lo, hi, p = expected[0]
    assert row.index == m
    assert row.hsic == pytest.approx(score, rel=1e-10, abs=1e-12)
    assert row.variance == pytest.approx(var, rel=1e-10, abs=1e-14)
    assert row.v_lower == pytest.approx(lo, rel=1e-10, abs=1e-12)
    assert row.v_upper == hi
    assert row.p_value == pytest.approx(p, abs=1e-10)
