"""Dataset container and CSV reading/writing."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import DataError
from .kernel import check_labels

REGRESSION = "regression"
MULTIVARIATE = "multivariate"
CLASSIFICATION = "classification"


@dataclass(frozen=True)
class Dataset:
    """Feature matrix plus a real, multivariate-real or categorical response.

    ``y`` is a float vector for regression, an ``(n, d_y)`` float matrix for
    multivariate regression and an int vector of labels ``1..num_classes``
    for classification.
    """

    X: np.ndarray
    y: np.ndarray
    response: str = REGRESSION
    feature_names: Tuple[str, ...] = ()
    response_names: Tuple[str, ...] = ("y",)
    num_classes: Optional[int] = None

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim != 2:
            raise DataError(f"X must be 2-dimensional, got shape {X.shape}")
        y = np.asarray(self.y)
        if y.shape[0] != X.shape[0]:
            raise DataError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
        if self.response == CLASSIFICATION:
            if self.num_classes is None:
                raise DataError("classification data needs num_classes")
            y = check_labels(y, self.num_classes)
        elif self.response == MULTIVARIATE:
            y = np.asarray(y, dtype=float)
            if y.ndim != 2:
                raise DataError("multivariate response must be an n x d_y matrix")
        elif self.response == REGRESSION:
            y = np.asarray(y, dtype=float)
            if y.ndim == 2 and y.shape[1] == 1:
                y = y[:, 0]
            if y.ndim != 1:
                raise DataError("regression response must be a vector")
        else:
            raise DataError(f"unknown response mode {self.response!r}")
        names = tuple(self.feature_names) or tuple(f"x{j + 1}" for j in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise DataError(f"{len(names)} feature names for {X.shape[1]} columns")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", names)
        if y.ndim == 2 and len(self.response_names) != y.shape[1]:
            object.__setattr__(self, "response_names", tuple(f"y{j + 1}" for j in range(y.shape[1])))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]


def _parse(cell: str, row: int, column: str) -> float:
    try:
        v = float(cell)
    except ValueError:
        raise DataError(f"row {row}, column {column!r}: cannot parse {cell!r} as a number") from None
    if not math.isfinite(v):
        raise DataError(f"row {row}, column {column!r}: non-finite value {cell!r}")
    return v


def read_csv(
    path,
    response: Sequence[str],
    num_classes: Optional[int] = None,
    exclude: Sequence[str] = (),
) -> Dataset:
    """Load a header-first, comma-separated UTF-8 file.

    ``response`` names the response column(s); with ``num_classes`` the single
    response column is read as integer labels. Columns in ``exclude`` (ids and
    the like) are dropped and every other column becomes a feature. Row
    numbers in error messages count the header as row 1.
    """
    response = list(response)
    if not response:
        raise DataError("no response column given")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}: row {lineno} has {len(row)} fields, header has {len(header)}")
            rows.append((lineno, row))
    if len(set(header)) != len(header):
        raise DataError(f"{path}: duplicate column names in header")
    missing = [c for c in list(response) + list(exclude) if c not in header]
    if missing:
        raise DataError(f"{path}: columns not found: {', '.join(missing)}")
    if not rows:
        raise DataError(f"{path}: no data rows")
    resp_idx = [header.index(c) for c in response]
    feat_idx = [j for j, h in enumerate(header) if h not in response and h not in exclude]
    if not feat_idx:
        raise DataError(f"{path}: no feature columns left")

    X = np.array([[_parse(r[j], ln, header[j]) for j in feat_idx] for ln, r in rows])
    Y = np.array([[_parse(r[j], ln, header[j]) for j in resp_idx] for ln, r in rows])
    features = tuple(header[j] for j in feat_idx)
    if num_classes is not None:
        if len(response) != 1:
            raise DataError("classification takes exactly one response column")
        labels = Y[:, 0]
        bad = np.flatnonzero((labels != np.round(labels)) | (labels < 1) | (labels > num_classes))
        if bad.size:
            ln = rows[bad[0]][0]
            raise DataError(f"{path}: row {ln}: label {labels[bad[0]]:g} not an integer in 1..{num_classes}")
        return Dataset(X, labels.astype(np.int64), CLASSIFICATION, features, tuple(response), int(num_classes))
    if len(response) == 1:
        return Dataset(X, Y[:, 0], REGRESSION, features, tuple(response))
    return Dataset(X, Y, MULTIVARIATE, features, tuple(response))


def write_csv(data: Dataset, path) -> None:
    """Write ``data`` so that ``read_csv`` returns identical arrays."""
    Y = data.y if data.y.ndim == 2 else data.y[:, None]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(list(data.feature_names) + list(data.response_names))
        for xr, yr in zip(data.X, Y):
            cells = [repr(float(v)) for v in xr]
            if data.response == CLASSIFICATION:
                cells += [str(int(v)) for v in yr]
            else:
                cells += [repr(float(v)) for v in yr]
            w.writerow(cells)
