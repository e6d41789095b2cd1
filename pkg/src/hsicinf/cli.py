"""Command line interface: ``hsicinf infer | simulate | gen``.

Every option can also be set through an environment variable named
``HSICINF_<COMMAND>_<OPTION>`` (e.g. ``HSICINF_INFER_K=5``) or through a JSON
or YAML file given with ``--config`` holding one mapping per command. Command
line flags win over environment variables, which win over the config file.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import sys
from pathlib import Path

import click
import yaml

from . import harness, synthdata
from .dataset import read_csv, write_csv
from .errors import DataError, NumericalError
from .kernel import KernelSpec, median_heuristic
from .pipeline import METHODS, PipelineConfig, canonical_method, run

EXIT_DATA = 3
EXIT_NUMERICAL = 4

REPORT_COLUMNS = ("feature_index", "feature_name", "hsic", "variance", "v_lower", "v_upper", "p_value", "reject")


def _split_list(value):
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        items = [v for part in value for v in str(part).split(",")]
    else:
        items = str(value).split(",")
    return [v.strip() for v in items if v.strip()]


def _int_list(ctx, param, value):
    try:
        return [int(v) for v in _split_list(value)]
    except ValueError:
        raise click.BadParameter("expected comma-separated integers") from None


def _load_config(ctx, param, value):
    if not value:
        return value
    text = Path(value).read_text()
    cfg = json.loads(text) if value.endswith(".json") else yaml.safe_load(text)
    if not isinstance(cfg, dict):
        raise click.BadParameter("config file must hold a mapping of command -> options")
    defaults = {}
    for command, opts in cfg.items():
        if not isinstance(opts, dict):
            raise click.BadParameter(f"section {command!r} must be a mapping")
        opts = {k.replace("-", "_"): v for k, v in opts.items()}
        cmd = ctx.command.commands.get(command) if hasattr(ctx.command, "commands") else None
        if cmd is None:
            raise click.BadParameter(f"unknown command section {command!r}")
        for p in cmd.params:
            if p.multiple and p.name in opts and not isinstance(opts[p.name], list):
                opts[p.name] = [opts[p.name]]
        defaults[command] = opts
    ctx.default_map = {**(ctx.default_map or {}), **defaults}
    return value


def _fail(exc: Exception):
    if isinstance(exc, NumericalError):
        code = EXIT_NUMERICAL
    else:
        code = EXIT_DATA
    click.echo(f"error: {exc}", err=True)
    sys.exit(code)


@click.group(context_settings={"auto_envvar_prefix": "HSICINF", "help_option_names": ["-h", "--help"]})
@click.option("--config", type=click.Path(exists=True, dir_okay=False), callback=_load_config,
              is_eager=True, expose_value=False, help="JSON/YAML file with per-command defaults.")
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose):
    """Kernel-based post-selection inference with block HSIC."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")


# ---------------------------------------------------------------- infer


def format_table(report, descriptions=None) -> str:
    """Two-column text table of feature description and p-value.

    Rejected features are marked with ``*``; p-values carry 12 significant digits.
    """
    descriptions = descriptions or {}
    names = [descriptions.get(r.name, r.name) for r in report.rows]
    width = max([len("Feature description")] + [len(n) + 2 for n in names])
    lines = [f"{'Feature description':<{width}}  p-value", "-" * (width + 20)]
    for name, r in zip(names, report.rows):
        mark = "* " if r.reject else "  "
        lines.append(f"{mark + name:<{width}}  {r.p_value:.12g}")
    lines.append(f"(* rejected at alpha={report.alpha:g}; method={report.method}, k={report.k}, B={report.block_size})")
    return "\n".join(lines)


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def write_report(report, out_dir: Path, descriptions=None) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    descriptions = descriptions or {}
    with open(out_dir / "report.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for r in report.rows:
            w.writerow([r.index, descriptions.get(r.name, r.name), repr(r.hsic), repr(r.variance),
                        repr(r.v_lower), repr(r.v_upper), repr(r.p_value), int(r.reject)])
    meta = {
        "method": report.method, "k": report.k, "block_size": report.block_size, "alpha": report.alpha,
        "seed": report.seed, "n_samples": report.n_samples, "kernel_x": report.kernel_x,
        "kernel_y": report.kernel_y, "warnings": list(report.warnings),
        "rows": [
            {
                "feature_index": r.index, "feature_name": descriptions.get(r.name, r.name),
                "column": r.name, "hsic": r.hsic, "variance": r.variance,
                "v_lower": _jsonable(r.v_lower), "v_upper": _jsonable(r.v_upper),
                "p_value": r.p_value, "reject": r.reject,
            }
            for r in report.rows
        ],
    }
    with open(out_dir / "report.json", "w") as fh:
        json.dump(meta, fh, indent=2)
    (out_dir / "report.txt").write_text(format_table(report, descriptions) + "\n")


def _response_kernel(kind, bandwidth, classes, data):
    if kind == "auto":
        if bandwidth is None:
            return None
        kind = "gaussian"
    if kind == "delta":
        if classes is None:
            raise click.BadParameter("delta kernel needs --classes", param_hint="--y-kernel")
        return KernelSpec.delta(classes)
    if kind == "linear":
        return KernelSpec.linear()
    if bandwidth is None:
        return KernelSpec.gaussian(median_heuristic(data.y) if data.y.ndim == 2 else 1.0)
    if str(bandwidth).lower() == "median":
        return KernelSpec.gaussian(median_heuristic(data.y))
    try:
        return KernelSpec.gaussian(float(bandwidth))
    except ValueError:
        raise click.BadParameter(f"expected a positive number or 'median', got {bandwidth!r}",
                                 param_hint="--y-bandwidth") from None


@main.command()
@click.argument("data", type=click.Path(exists=True, dir_okay=False))
@click.option("--response", required=True, multiple=True, help="Response column(s); repeat or comma-separate.")
@click.option("--classes", type=click.IntRange(min=2), default=None, help="Treat the response as labels 1..L.")
@click.option("--exclude", multiple=True, help="Columns to ignore (ids etc.); repeat or comma-separate.")
@click.option("--k", type=click.IntRange(min=1), default=10, show_default=True, help="Features to select.")
@click.option("--block-size", type=click.IntRange(min=4), default=10, show_default=True)
@click.option("--alpha", type=click.FloatRange(0, 1, min_open=True, max_open=True), default=0.05, show_default=True)
@click.option("--shrinkage", type=click.FloatRange(0, 1, max_open=True), default=0.1, show_default=True)
@click.option("--method", type=click.Choice(list(METHODS) + ["hsic"], case_sensitive=False), default="hsicInf", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--x-bandwidth", type=click.FloatRange(0, min_open=True), default=1.0, show_default=True)
@click.option("--y-kernel", type=click.Choice(["auto", "gaussian", "linear", "delta"]), default="auto", show_default=True)
@click.option("--y-bandwidth", default=None, help="Gaussian output bandwidth or 'median' (default: 1, median for vector output).")
@click.option("--labels", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON object mapping column names to descriptions for the report.")
@click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True, help="Worker cap (single runs use one).")
@click.option("--out-dir", type=click.Path(file_okay=False), default="hsicinf-report", show_default=True)
def infer(data, response, classes, exclude, k, block_size, alpha, shrinkage, method, seed,
          x_bandwidth, y_kernel, y_bandwidth, labels, threads, out_dir):
    """Select the top-k features of DATA and test them."""
    response = _split_list(response)
    if not response:
        raise click.BadParameter("at least one response column is required", param_hint="--response")
    descriptions = json.loads(Path(labels).read_text()) if labels else {}
    try:
        dataset = read_csv(data, response, classes, _split_list(exclude))
        if k >= dataset.d:
            raise click.BadParameter(f"must be smaller than the {dataset.d} features", param_hint="--k")
        spec_y = _response_kernel(y_kernel, y_bandwidth, classes, dataset)
        cfg = PipelineConfig(k=k, block_size=block_size, alpha=alpha, shrinkage=shrinkage,
                             spec_x=KernelSpec.gaussian(x_bandwidth), spec_y=spec_y,
                             method=canonical_method(method), seed=seed)
        report = run(dataset, cfg)
    except (DataError, NumericalError) as exc:
        _fail(exc)
    write_report(report, Path(out_dir), descriptions)
    click.echo(format_table(report, descriptions))


# ---------------------------------------------------------------- simulate


def _write_tidy(points, out_dir: Path) -> None:
    by_scenario = {}
    for p in points:
        by_scenario.setdefault(p.scenario, []).append(p)
    for scenario, pts in by_scenario.items():
        for metric in ("fpr", "tpr"):
            with open(out_dir / f"{metric}_{scenario}.csv", "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["scenario", "n", "block_size", "method", "metric", "value", "se"])
                for p in pts:
                    w.writerow([p.scenario, p.n, p.block_size, p.method, metric,
                                repr(getattr(p, f"mean_{metric}")), repr(getattr(p, f"se_{metric}"))])


@main.command()
@click.option("--scenario", "scenarios", multiple=True, required=True,
              help=f"Scenario(s) from {', '.join(synthdata.SCENARIOS)}; repeat or comma-separate.")
@click.option("--methods", default="hsicInf,split", show_default=True)
@click.option("--ns", default=",".join(str(n) for n in harness.DEFAULT_NS), show_default=True, callback=_int_list)
@click.option("--b-sweep", "--block-sizes", "block_sizes", default="10", show_default=True, callback=_int_list,
              help="Block sizes to run; more than one gives a B-sweep.")
@click.option("--trials", type=click.IntRange(min=1), default=None,
              help="Trials per cell [default: 300 for null, 100 otherwise].")
@click.option("--k", type=click.IntRange(min=1), default=10, show_default=True)
@click.option("--alpha", type=click.FloatRange(0, 1, min_open=True, max_open=True), default=0.05, show_default=True)
@click.option("--shrinkage", type=click.FloatRange(0, 1, max_open=True), default=0.1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default="hsicinf-sim", show_default=True)
def simulate(scenarios, methods, ns, block_sizes, trials, k, alpha, shrinkage, seed, threads, out_dir):
    """Monte-Carlo TPR/FPR curves for synthetic scenarios."""
    scenarios = _split_list(scenarios)
    if not scenarios:
        raise click.BadParameter("give at least one scenario", param_hint="--scenario")
    for s in scenarios:
        if s not in synthdata.SCENARIOS:
            raise click.BadParameter(f"unknown scenario {s!r}", param_hint="--scenario")
    try:
        methods = [canonical_method(m) for m in _split_list(methods)]
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--methods") from None
    if not methods or not ns or not block_sizes:
        raise click.UsageError("methods, --ns and --b-sweep must not be empty")
    out = Path(out_dir)
    points = []
    for scenario in scenarios:
        n_trials = trials or (300 if scenario == synthdata.NULL else 100)
        try:
            grid = harness.ExperimentGrid(
                scenarios=(scenario,), ns=tuple(ns), block_sizes=tuple(block_sizes), methods=tuple(methods),
                trials=n_trials, base_seed=seed, k=k, alpha=alpha, shrinkage=shrinkage,
            )
        except ValueError as exc:
            raise click.UsageError(str(exc)) from None
        points += harness.run_grid(grid, out / scenario, n_jobs=threads)
    out.mkdir(parents=True, exist_ok=True)
    harness.write_curves(points, out / "curves.csv")
    _write_tidy(points, out)
    for p in points:
        click.echo(f"{p.scenario:<13}n={p.n:<5}B={p.block_size:<3}{p.method:<10}"
                   f"TPR={p.mean_tpr:.3f}±{p.se_tpr:.3f}  FPR={p.mean_fpr:.3f}±{p.se_fpr:.3f}"
                   + ("  [flagged]" if p.flagged else ""))


# ---------------------------------------------------------------- gen


@main.command()
@click.option("--scenario", required=True, type=click.Choice(synthdata.SCENARIOS))
@click.option("--n", type=click.IntRange(min=1), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def gen(scenario, n, seed, out):
    """Write a synthetic dataset to CSV."""
    data = synthdata.generate(scenario, n, seed)
    write_csv(data, out)
    click.echo(f"wrote {data.n} x {data.d} {scenario} dataset to {out} (response: {','.join(data.response_names)})")


if __name__ == "__main__":
    main()
