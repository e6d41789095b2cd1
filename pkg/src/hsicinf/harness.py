"""Monte-Carlo experiments over scenarios, sample sizes, block sizes and methods.

Seeds
-----
Every trial draws its dataset with ``derive_seed(base_seed, "data", scenario,
n, trial)`` and runs the pipeline with ``derive_seed(base_seed, "run",
scenario, n, trial)``. ``derive_seed`` hashes the ``|``-joined string forms of
its arguments with SHA-256 and keeps the first 8 bytes (big-endian) masked to
63 bits. Method and block size are deliberately left out, so within a trial
all methods and block sizes see the same data and the same shuffle.

Persistence
-----------
With an output directory, each finished trial is appended to ``trials.csv``
(columns ``TRIAL_COLUMNS``) as soon as it completes, and ``curves.csv`` holds
the per-cell aggregates. A rerun reuses any stored trial whose key (cell,
trial index and both seeds) matches, so an interrupted grid resumes where it
stopped.
"""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from . import synthdata
from .errors import HSICInfError
from .pipeline import HSIC_INF, SPLIT, PipelineConfig, canonical_method, evaluate_report, run

logger = logging.getLogger(__name__)

DEFAULT_NS = tuple(range(300, 3001, 300))
FAILURE_FLAG_RATE = 0.10

TRIAL_COLUMNS = (
    "scenario", "n", "block_size", "method", "trial", "data_seed", "run_seed",
    "status", "tpr", "fpr", "selected", "p_values", "error",
)
CURVE_COLUMNS = (
    "scenario", "n", "block_size", "method", "trials", "failures",
    "mean_tpr", "mean_fpr", "se_tpr", "se_fpr", "flagged",
)


def derive_seed(*parts) -> int:
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big") & ((1 << 63) - 1)


@dataclass(frozen=True)
class ExperimentGrid:
    scenarios: Tuple[str, ...]
    ns: Tuple[int, ...] = DEFAULT_NS
    block_sizes: Tuple[int, ...] = (5, 10)
    methods: Tuple[str, ...] = (HSIC_INF, SPLIT)
    trials: int = 100
    base_seed: int = 0
    k: int = 10
    alpha: float = 0.05
    shrinkage: float = 0.1

    def __post_init__(self):
        for name in ("scenarios", "ns", "block_sizes", "methods"):
            value = tuple(getattr(self, name))
            if not value:
                raise ValueError(f"grid needs at least one entry in {name}")
            object.__setattr__(self, name, value)
        for s in self.scenarios:
            if s not in synthdata.SCENARIOS:
                raise ValueError(f"unknown scenario {s!r}")
        object.__setattr__(self, "methods", tuple(canonical_method(m) for m in self.methods))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    def cells(self):
        for s in self.scenarios:
            for n in self.ns:
                for B in self.block_sizes:
                    for m in self.methods:
                        yield (s, int(n), int(B), m)


@dataclass(frozen=True)
class TrialRecord:
    scenario: str
    n: int
    block_size: int
    method: str
    trial: int
    data_seed: int
    run_seed: int
    status: str
    tpr: float = math.nan
    fpr: float = math.nan
    selected: Tuple[int, ...] = ()
    p_values: Tuple[float, ...] = ()
    error: str = ""

    @property
    def cell(self):
        return (self.scenario, self.n, self.block_size, self.method)

    @property
    def key(self):
        return self.cell + (self.trial, self.data_seed, self.run_seed)

    def to_row(self) -> List[str]:
        return [
            self.scenario, str(self.n), str(self.block_size), self.method, str(self.trial),
            str(self.data_seed), str(self.run_seed), self.status, repr(self.tpr), repr(self.fpr),
            " ".join(str(i) for i in self.selected),
            " ".join(repr(p) for p in self.p_values),
            self.error,
        ]

    @classmethod
    def from_row(cls, row: Dict[str, str]) -> "TrialRecord":
        return cls(
            scenario=row["scenario"],
            n=int(row["n"]),
            block_size=int(row["block_size"]),
            method=row["method"],
            trial=int(row["trial"]),
            data_seed=int(row["data_seed"]),
            run_seed=int(row["run_seed"]),
            status=row["status"],
            tpr=float(row["tpr"]),
            fpr=float(row["fpr"]),
            selected=tuple(int(v) for v in row["selected"].split()),
            p_values=tuple(float(v) for v in row["p_values"].split()),
            error=row["error"],
        )


@dataclass(frozen=True)
class CurvePoint:
    """Aggregate of one grid cell over its successful trials.

    Standard errors are sample standard deviations over ``sqrt(trials)``,
    reported as 0 when fewer than two trials succeeded.
    """

    scenario: str
    n: int
    block_size: int
    method: str
    trials: int
    failures: int
    mean_tpr: float
    mean_fpr: float
    se_tpr: float
    se_fpr: float
    flagged: bool


def run_trial(grid: ExperimentGrid, scenario: str, n: int, block_size: int, method: str, trial: int) -> TrialRecord:
    data_seed = derive_seed(grid.base_seed, "data", scenario, n, trial)
    run_seed = derive_seed(grid.base_seed, "run", scenario, n, trial)
    head = dict(scenario=scenario, n=n, block_size=block_size, method=method,
                trial=trial, data_seed=data_seed, run_seed=run_seed)
    try:
        data = synthdata.generate(scenario, n, data_seed)
        cfg = PipelineConfig(k=grid.k, block_size=block_size, alpha=grid.alpha,
                             shrinkage=grid.shrinkage, method=method, seed=run_seed)
        report = run(data, cfg)
    except HSICInfError as exc:
        return TrialRecord(status="failed", error=f"{type(exc).__name__}: {exc}", **head)
    tpr, fpr = evaluate_report(report, synthdata.ground_truth(scenario))
    return TrialRecord(status="ok", tpr=tpr, fpr=fpr, selected=tuple(report.selected),
                       p_values=tuple(float(p) for p in report.p_values), **head)


def _run_task(args):
    return run_trial(*args)


def load_trials(path) -> List[TrialRecord]:
    path = Path(path)
    if not path.exists():
        return []
    with open(path, newline="") as fh:
        text = fh.read()
    if text and not text.endswith("\n"):
        # the last row was cut off mid-write; it is recomputed
        text = text[: text.rfind("\n") + 1]
    records = []
    for row in csv.DictReader(text.splitlines(keepends=True)):
        try:
            if None in row or None in row.values():
                raise ValueError("wrong number of fields")
            records.append(TrialRecord.from_row(row))
        except (KeyError, TypeError, ValueError):
            logger.warning("skipping unreadable row in %s", path)
    return records


def run_trials(grid: ExperimentGrid, out_dir=None, n_jobs: int = 1) -> List[TrialRecord]:
    """Run (or resume) every trial of the grid; records come back sorted by cell and trial."""
    tasks = [(grid,) + cell + (t,) for cell in grid.cells() for t in range(grid.trials)]
    done: Dict[tuple, TrialRecord] = {}
    sink = None
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        trials_path = out_dir / "trials.csv"
        for rec in load_trials(trials_path):
            done[rec.key] = rec
        fresh = not trials_path.exists() or trials_path.stat().st_size == 0
        if not fresh:
            with open(trials_path, "rb") as fh:
                fh.seek(-1, 2)
                torn = fh.read(1) != b"\n"
        sink = open(trials_path, "a", newline="")
        writer = csv.writer(sink, lineterminator="\n")
        if fresh:
            writer.writerow(TRIAL_COLUMNS)
        elif torn:
            sink.write("\n")
        with open(out_dir / "grid.json", "w") as fh:
            json.dump(asdict(grid), fh, indent=2)

    def key_of(task):
        g, s, n, B, m, t = task
        return (s, n, B, m, t, derive_seed(g.base_seed, "data", s, n, t), derive_seed(g.base_seed, "run", s, n, t))

    todo = [task for task in tasks if key_of(task) not in done]
    if len(todo) < len(tasks):
        logger.info("resuming: %d of %d trials already stored", len(tasks) - len(todo), len(tasks))

    results = dict(done)

    def keep(stream):
        for rec in stream:
            results[rec.key] = rec
            if sink is not None:
                writer.writerow(rec.to_row())
                sink.flush()

    try:
        if n_jobs == 1 or len(todo) <= 1:
            keep(map(_run_task, todo))
        else:
            with ProcessPoolExecutor(max_workers=n_jobs) as pool:
                keep(pool.map(_run_task, todo, chunksize=max(1, len(todo) // (8 * n_jobs))))
    finally:
        if sink is not None:
            sink.close()

    wanted = {key_of(task) for task in tasks}
    order = {cell: i for i, cell in enumerate(grid.cells())}
    records = [r for k, r in results.items() if k in wanted]
    records.sort(key=lambda r: (order[r.cell], r.trial))
    return records


def _se(values: np.ndarray) -> float:
    if values.size < 2:
        return 0.0
    return float(values.std(ddof=1) / math.sqrt(values.size))


def aggregate(records: Iterable[TrialRecord]) -> List[CurvePoint]:
    """Per-cell means and standard errors, in order of first appearance."""
    records = list(records)
    cells: Dict[tuple, List[TrialRecord]] = {}
    for r in records:
        cells.setdefault(r.cell, []).append(r)
    points = []
    for cell, recs in cells.items():
        recs = sorted(recs, key=lambda r: r.trial)
        ok = [r for r in recs if r.status == "ok"]
        failures = len(recs) - len(ok)
        tpr = np.array([r.tpr for r in ok])
        fpr = np.array([r.fpr for r in ok])
        points.append(
            CurvePoint(
                *cell,
                trials=len(ok),
                failures=failures,
                mean_tpr=float(tpr.mean()) if ok else math.nan,
                mean_fpr=float(fpr.mean()) if ok else math.nan,
                se_tpr=_se(tpr),
                se_fpr=_se(fpr),
                flagged=failures > FAILURE_FLAG_RATE * len(recs),
            )
        )
    return points


def write_curves(points: Sequence[CurvePoint], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CURVE_COLUMNS)
        for p in points:
            w.writerow([repr(v) if isinstance(v, float) else str(v) for v in _curve_row(p)])


def _curve_row(p: CurvePoint) -> tuple:
    return tuple(getattr(p, c) for c in CURVE_COLUMNS)


def run_grid(grid: ExperimentGrid, out_dir=None, n_jobs: int = 1) -> List[CurvePoint]:
    """Run every cell of ``grid`` and aggregate it.

    Failed trials (degenerate covariance, too few samples) are excluded from
    the means and counted in ``failures``; cells with more than 10% failures
    are flagged and logged.
    """
    records = run_trials(grid, out_dir, n_jobs)
    points = aggregate(records)
    for p in points:
        if p.flagged:
            logger.warning("cell %s n=%d B=%d %s: %d of %d trials failed",
                           p.scenario, p.n, p.block_size, p.method, p.failures, p.failures + p.trials)
    if out_dir is not None:
        write_curves(points, Path(out_dir) / "curves.csv")
    return points
