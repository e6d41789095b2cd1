"""Synthetic benchmark data.

Six scenarios, all with 20 input features:

* ``null``: x ~ N(0, I), y ~ N(0, 1) independent of x.
* ``linear``: y = x1 + ... + x5 + 0.1 e.
* ``additive``: y = x1^2 + ... + x5^2 + 0.1 e.
* ``nonadditive``: y = x1 exp(x2) x3 exp(x4) x5 + 0.1 e.
* ``multivariate``: three outputs driven by x1..x4.
* ``threeclass``: labels 1..3 with class-conditional Gaussians on x1, x2.

For the regression scenarios the first five inputs (four for
``multivariate``) have pairwise covariance 0.05 and unit variance; all other
inputs are independent standard normals.
"""
from __future__ import annotations

from typing import Iterable, Optional, Tuple, Union

import numpy as np

from .dataset import CLASSIFICATION, MULTIVARIATE, REGRESSION, Dataset
from .errors import DataError

NULL = "null"
LINEAR = "linear"
ADDITIVE = "additive"
NONADDITIVE = "nonadditive"
MULTIVARIATE_SCENARIO = "multivariate"
THREECLASS = "threeclass"

SCENARIOS = (NULL, LINEAR, ADDITIVE, NONADDITIVE, MULTIVARIATE_SCENARIO, THREECLASS)
N_FEATURES = 20
NOISE_SCALE = 0.1

SeedLike = Union[None, int, np.random.Generator]


def _rng(seed: SeedLike) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _check_scenario(scenario: str) -> str:
    if scenario not in SCENARIOS:
        raise DataError(f"unknown scenario {scenario!r}; expected one of {', '.join(SCENARIOS)}")
    return scenario


def input_covariance(d: int = N_FEATURES, corr_block: Iterable[int] = ()) -> np.ndarray:
    """Identity, except off-diagonals 0.05 inside ``corr_block`` (0-based)."""
    cov = np.eye(d)
    idx = np.asarray(sorted(set(corr_block)), dtype=int)
    if idx.size and (idx.min() < 0 or idx.max() >= d):
        raise DataError(f"corr_block indices must lie in 0..{d - 1}")
    if idx.size:
        cov[np.ix_(idx, idx)] = 0.05
        cov[idx, idx] = 1.0
    return cov


def gen_input(n: int, d: int = N_FEATURES, corr_block: Iterable[int] = (), seed: SeedLike = None) -> np.ndarray:
    rng = _rng(seed)
    cov = input_covariance(d, corr_block)
    return rng.standard_normal((n, d)) @ np.linalg.cholesky(cov).T


def corr_block(scenario: str) -> Tuple[int, ...]:
    _check_scenario(scenario)
    if scenario in (LINEAR, ADDITIVE, NONADDITIVE):
        return tuple(range(5))
    if scenario == MULTIVARIATE_SCENARIO:
        return tuple(range(4))
    return ()


def gen_response(scenario: str, X: np.ndarray, seed: SeedLike = None, noise: Optional[np.ndarray] = None) -> np.ndarray:
    """Response for a regression scenario.

    ``noise`` overrides the standard normal draws ``e`` (shape ``(n,)``, or
    ``(n, 3)`` for ``multivariate``).
    """
    _check_scenario(scenario)
    if scenario == THREECLASS:
        raise DataError("threeclass labels are drawn jointly with the inputs; use generate()")
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != N_FEATURES:
        raise DataError(f"X must have {N_FEATURES} columns, got shape {X.shape}")
    n = X.shape[0]
    rng = _rng(seed)
    shape = (n, 3) if scenario == MULTIVARIATE_SCENARIO else (n,)
    E = rng.standard_normal(shape) if noise is None else np.asarray(noise, dtype=float).reshape(shape)
    x = X.T
    if scenario == NULL:
        return E
    if scenario == LINEAR:
        return x[:5].sum(axis=0) + NOISE_SCALE * E
    if scenario == ADDITIVE:
        return (x[:5] ** 2).sum(axis=0) + NOISE_SCALE * E
    if scenario == NONADDITIVE:
        return x[0] * np.exp(x[1]) * x[2] * np.exp(x[3]) * x[4] + NOISE_SCALE * E
    Y = np.column_stack(
        [
            x[0] + 2.0 * x[1],
            2.0 * x[0] + x[1] ** 2,
            x[2] * np.exp(2.0 * x[3]),
        ]
    )
    return Y + NOISE_SCALE * E


def gen_three_class(n: int, seed: SeedLike = None) -> Tuple[np.ndarray, np.ndarray]:
    """Labels uniform on {1, 2, 3}; x1, x2 class-conditional, x3..x20 noise.

    Class 1 is centred at (-3, 0), class 2 at (3, 0), both with identity
    covariance. Class 3 is an equal mixture of N((0, 3), diag(1, 2.25)) and
    N((0, -3), diag(1, 2.25)).
    """
    rng = _rng(seed)
    y = rng.integers(1, 4, size=n)
    centre = np.zeros((n, 2))
    scale = np.ones((n, 2))
    centre[y == 1, 0] = -3.0
    centre[y == 2, 0] = 3.0
    third = y == 3
    side = rng.choice([-3.0, 3.0], size=n)
    centre[third, 1] = side[third]
    scale[third, 1] = 1.5
    head = centre + scale * rng.standard_normal((n, 2))
    tail = rng.standard_normal((n, N_FEATURES - 2))
    return np.hstack([head, tail]), y


def ground_truth(scenario: str) -> frozenset:
    """0-based indices of the features the response depends on."""
    _check_scenario(scenario)
    if scenario in (LINEAR, ADDITIVE, NONADDITIVE):
        return frozenset(range(5))
    if scenario == MULTIVARIATE_SCENARIO:
        return frozenset(range(4))
    if scenario == THREECLASS:
        return frozenset({0, 1})
    return frozenset()


def generate(scenario: str, n: int, seed: SeedLike = None) -> Dataset:
    """Draw ``n`` samples of a scenario as a Dataset."""
    _check_scenario(scenario)
    if n < 1:
        raise DataError(f"n must be positive, got {n}")
    rng = _rng(seed)
    if scenario == THREECLASS:
        X, y = gen_three_class(n, rng)
        return Dataset(X, y, CLASSIFICATION, num_classes=3)
    X = gen_input(n, N_FEATURES, corr_block(scenario), rng)
    y = gen_response(scenario, X, rng)
    if scenario == MULTIVARIATE_SCENARIO:
        return Dataset(X, y, MULTIVARIATE, response_names=("y1", "y2", "y3"))
    return Dataset(X, y, REGRESSION)
