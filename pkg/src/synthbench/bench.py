"""Evaluation protocol: subset, repeated timed train/generate runs, scoring, reports.

Per generator, efficiency is the mean wall-clock duration of `runs`
train-and-generate executions over seeded hyperparameter draws; the data
metrics are computed once, on the final run's synthetic table against the
training table. External generators run through the plugin protocol:

    <command> --train <csv> --n <count> --out <csv> --seed <u64> [--hparams <json>]

The plugin writes a CSV with the training header and exits 0; nonzero exit,
timeout, and malformed output are distinguished in the report.
"""

from __future__ import annotations

import hashlib
import json
import os
import shlex
import signal
import subprocess
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import GeneratorError, SchemaError, TableIOError
from .fidelity import fidelity_scores
from .generators import GeneratorSpec, generate_builtin
from .graph import graph_compare
from .privacy import PrivacyConfig, privacy_scores
from .synthesis import SynthesisConfig, synthesis_score
from .tabular import DataTable, fit_normalization, load_table, write_table

__all__ = [
    "BenchConfig",
    "MetricReport",
    "ALL_METRICS",
    "subset",
    "timed_generate",
    "run_benchmark",
    "emit_report",
    "report_to_dict",
    "report_from_dict",
    "render_markdown",
]

ALL_METRICS = ("fidelity", "synthesis", "privacy", "graph")

TMPDIR_ENV = "SYNTHBENCH_TMPDIR"
PLUGIN_TIMEOUT_ENV = "SYNTHBENCH_PLUGIN_TIMEOUT"

MARKDOWN_COLUMNS = (
    "column-wise Fidelity score",
    "row-wise Fidelity score",
    "Synthesis score",
    "Privacy - DCR 5th percentile",
    "Privacy - NNDR 5th percentile",
    "Efficiency",
    "Graph Structure-NetSimile",
)

# Key order of one report object in emitted JSON.
_REPORT_FIELDS = (
    "generator",
    "dataset",
    "column_fidelity",
    "row_fidelity",
    "synthesis",
    "dcr_p5",
    "nndr_p5",
    "efficiency_seconds",
    "netsimile",
    "seed",
    "config_hash",
    "started_at",
    "finished_at",
    "status",
    "error",
    "notes",
    "diagnostics",
)


@dataclass(frozen=True)
class BenchConfig:
    """Protocol constants; defaults follow the published evaluation setup."""

    runs: int = 30
    train_size: int = 100_000
    gen_size: int = 10_000
    seed: int = 0
    dataset_id: str = "dataset"
    metrics: tuple[str, ...] = ALL_METRICS
    margin: float = 0.01
    percentile: float = 5.0
    graph_source: str | None = None
    graph_target: str | None = None
    holdout: bool = False
    plugin_timeout: float = 7200.0
    parallel_metrics: bool = False
    grids: Mapping[str, Mapping[str, Sequence]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.runs < 1 or self.train_size < 1 or self.gen_size < 1:
            raise SchemaError("runs, train_size and gen_size must all be >= 1")
        unknown = set(self.metrics) - set(ALL_METRICS)
        if unknown:
            raise SchemaError(f"unknown metric toggles: {sorted(unknown)}")

    def config_hash(self) -> str:
        payload = {
            "runs": self.runs,
            "train_size": self.train_size,
            "gen_size": self.gen_size,
            "seed": self.seed,
            "dataset_id": self.dataset_id,
            "metrics": list(self.metrics),
            "margin": self.margin,
            "percentile": self.percentile,
            "graph_source": self.graph_source,
            "graph_target": self.graph_target,
            "holdout": self.holdout,
            "grids": {g: {k: list(v) for k, v in sorted(params.items())} for g, params in sorted(self.grids.items())},
        }
        blob = json.dumps(payload, sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class MetricReport:
    """One generator's row of the comparison table, plus run metadata."""

    generator: str
    dataset: str
    column_fidelity: float | None = None
    row_fidelity: float | None = None
    synthesis: float | None = None
    dcr_p5: float | None = None
    nndr_p5: float | None = None
    efficiency_seconds: float | None = None
    netsimile: float | None = None
    seed: int = 0
    config_hash: str = ""
    started_at: str = ""
    finished_at: str = ""
    status: str = "ok"
    error: str | None = None
    notes: dict[str, str] = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def subset(real: DataTable, k: int, seed: int) -> DataTable:
    """min(k, row_count) rows sampled uniformly without replacement, seeded."""
    if k < 1:
        raise SchemaError("subset size must be >= 1")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(real.row_count)
    return real.take(perm[: min(k, real.row_count)])


def _run_seed(spec_seed: int, run_index: int) -> int:
    """Derived 64-bit seed for one timed run; stable across platforms."""
    ss = np.random.SeedSequence(spec_seed, spawn_key=(run_index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _draw_hyperparams(cfg: BenchConfig, spec: GeneratorSpec, run_index: int) -> dict[str, str]:
    """Uniform draw from the generator's grid; empty grid means no hyperparameters."""
    grid = cfg.grids.get(spec.name, {})
    if not grid:
        return dict(spec.hyperparams)
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed, spawn_key=(run_index, 1)))
    drawn = dict(spec.hyperparams)
    for param in sorted(grid):
        values = list(grid[param])
        drawn[param] = str(values[rng.integers(0, len(values))])
    return drawn


def _plugin_timeout(cfg: BenchConfig) -> float:
    env = os.environ.get(PLUGIN_TIMEOUT_ENV)
    if env is not None:
        try:
            return float(env)
        except ValueError:
            raise SchemaError(f"{PLUGIN_TIMEOUT_ENV} must be a number, got {env!r}")
    return cfg.plugin_timeout


def _workdir() -> str | None:
    return os.environ.get(TMPDIR_ENV) or None


def _run_plugin(
    spec: GeneratorSpec,
    train: DataTable,
    gen_size: int,
    seed: int,
    timeout: float,
) -> DataTable:
    argv = shlex.split(spec.command or "")
    with tempfile.TemporaryDirectory(prefix="synthbench-", dir=_workdir()) as tmp:
        tmp_path = Path(tmp)
        train_csv = tmp_path / "train.csv"
        out_csv = tmp_path / "synthetic.csv"
        write_table(train, train_csv)
        argv += ["--train", str(train_csv), "--n", str(gen_size), "--out", str(out_csv), "--seed", str(seed)]
        if spec.hyperparams:
            hparams_file = tmp_path / "hparams.json"
            hparams_file.write_text(json.dumps(dict(spec.hyperparams)), encoding="utf-8")
            argv += ["--hparams", str(hparams_file)]

        stderr_path = tmp_path / "stderr.txt"
        try:
            with open(stderr_path, "wb") as stderr_file:
                proc = subprocess.Popen(
                    argv,
                    stdout=subprocess.DEVNULL,
                    stderr=stderr_file,
                    start_new_session=True,
                )
                try:
                    returncode = proc.wait(timeout=timeout)
                except subprocess.TimeoutExpired:
                    try:
                        os.killpg(os.getpgid(proc.pid), signal.SIGKILL)
                    except (ProcessLookupError, PermissionError):
                        proc.kill()
                    proc.wait()
                    raise GeneratorError(f"plugin timed out after {timeout:.0f} s: {spec.command}")
        except FileNotFoundError as exc:
            raise GeneratorError(f"plugin command not found: {argv[0]}") from exc

        stderr_text = stderr_path.read_text(encoding="utf-8", errors="replace")[-4000:]
        if returncode != 0:
            raise GeneratorError(f"plugin failed (exit {returncode}): {stderr_text.strip() or 'no stderr output'}")
        if not out_csv.exists():
            raise GeneratorError("plugin exited 0 but wrote no output file")
        try:
            result = load_table(out_csv, schema=train.schema)
        except (SchemaError, TableIOError) as exc:
            raise GeneratorError(f"plugin output malformed: {exc}") from exc
        if result.dropped > 0:
            raise GeneratorError(
                f"plugin output violates the training schema: {result.dropped} unparseable row(s)"
            )
        return result.table


def timed_generate(
    spec: GeneratorSpec,
    train: DataTable,
    gen_size: int,
    seed: int,
    timeout: float = 7200.0,
) -> tuple[DataTable, float]:
    """Run one train-and-generate span and return (synthetic table, wall seconds).

    Builtins time fit + sample in-process; plugins time the whole subprocess
    lifetime. The output is validated against the training schema before it
    is accepted.
    """
    if train.row_count == 0:
        raise GeneratorError("training table is empty")
    start = time.perf_counter()
    if spec.kind == "plugin":
        synth = _run_plugin(spec, train, gen_size, seed, timeout)
    else:
        synth = generate_builtin(spec.kind, train, gen_size, seed)
    elapsed = time.perf_counter() - start
    if synth.schema.names != train.schema.names:
        raise GeneratorError("synthetic table violates the training schema")
    return synth, max(elapsed, 1e-9)


def _compute_metrics(report: MetricReport, reference: DataTable, synth: DataTable, cfg: BenchConfig) -> None:
    """Fill the metric fields of `report` from the final synthetic table."""
    tasks = {}

    def fidelity_task():
        return fidelity_scores(reference, synth)

    def synthesis_task():
        return synthesis_score(reference, synth, SynthesisConfig(cfg.margin))

    def privacy_task():
        params = fit_normalization(reference)
        return privacy_scores(reference, synth, params, PrivacyConfig(cfg.percentile))

    def graph_task():
        return graph_compare(reference, synth, cfg.graph_source, cfg.graph_target)

    if "fidelity" in cfg.metrics:
        tasks["fidelity"] = fidelity_task
    if "synthesis" in cfg.metrics:
        tasks["synthesis"] = synthesis_task
    if "privacy" in cfg.metrics:
        tasks["privacy"] = privacy_task
    if "graph" in cfg.metrics and cfg.graph_source and cfg.graph_target:
        tasks["graph"] = graph_task

    if cfg.parallel_metrics and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=len(tasks)) as pool:
            futures = {name: pool.submit(fn) for name, fn in tasks.items()}
            results = {name: fut.result() for name, fut in futures.items()}
    else:
        results = {name: fn() for name, fn in tasks.items()}

    if "fidelity" in results:
        fid = results["fidelity"]
        report.column_fidelity = fid.column_wise
        report.row_fidelity = fid.row_wise
        if fid.row_wise is None:
            report.notes["row_fidelity"] = fid.row_wise_reason or "undefined"
    if "synthesis" in results:
        report.synthesis = results["synthesis"]
    if "privacy" in results:
        priv = results["privacy"]
        report.dcr_p5 = priv.dcr_p
        report.nndr_p5 = priv.nndr_p
    if "graph" in results:
        cmp = results["graph"]
        report.netsimile = cmp.distance
        if cmp.distance is None:
            report.notes["netsimile"] = cmp.reason or "empty graph"
        report.diagnostics["graph"] = {
            "real_nodes": cmp.real_nodes,
            "real_edges": cmp.real_edges,
            "synth_nodes": cmp.synth_nodes,
            "synth_edges": cmp.synth_edges,
            "single_cluster_flag": cmp.single_cluster_flag,
            "real_signature": list(cmp.real_signature) if cmp.real_signature else None,
            "synth_signature": list(cmp.synth_signature) if cmp.synth_signature else None,
        }
    elif "graph" in cfg.metrics:
        report.notes["netsimile"] = "graph columns not configured"


def run_benchmark(real: DataTable, specs: Sequence[GeneratorSpec], cfg: BenchConfig) -> list[MetricReport]:
    """The full protocol for every generator spec; failures isolate per generator."""
    if not specs:
        raise SchemaError("run_benchmark needs at least one generator spec")
    perm = np.random.default_rng(cfg.seed).permutation(real.row_count)
    train = real.take(perm[: min(cfg.train_size, real.row_count)])
    if cfg.holdout:
        if cfg.train_size >= real.row_count:
            raise SchemaError("holdout requires train_size < dataset rows")
        reference = real.take(perm[cfg.train_size :])
    else:
        reference = train
    timeout = _plugin_timeout(cfg)
    config_hash = cfg.config_hash()

    reports = []
    for spec in specs:
        report = MetricReport(
            generator=spec.name,
            dataset=cfg.dataset_id,
            seed=spec.seed,
            config_hash=config_hash,
            started_at=_utcnow(),
        )
        try:
            durations = []
            synth = None
            for run_index in range(cfg.runs):
                run_spec = replace(spec, hyperparams=_draw_hyperparams(cfg, spec, run_index))
                synth, seconds = timed_generate(run_spec, train, cfg.gen_size, _run_seed(spec.seed, run_index), timeout)
                durations.append(seconds)
            report.efficiency_seconds = float(np.mean(durations))
            _compute_metrics(report, reference, synth, cfg)
        except (GeneratorError, SchemaError, TableIOError) as exc:
            report.status = "failed"
            report.error = str(exc)
        report.finished_at = _utcnow()
        reports.append(report)
    return reports


def report_to_dict(report: MetricReport) -> dict:
    return {name: getattr(report, name) for name in _REPORT_FIELDS}


def report_from_dict(data: Mapping) -> MetricReport:
    kwargs = {name: data[name] for name in _REPORT_FIELDS if name in data}
    kwargs["notes"] = dict(kwargs.get("notes") or {})
    kwargs["diagnostics"] = dict(kwargs.get("diagnostics") or {})
    return MetricReport(**kwargs)


def _cell(value: float | None, decimals: int = 5) -> str:
    if value is None:
        return "NaN"
    return f"{value:.{decimals}f}"


def render_markdown(reports: Sequence[MetricReport]) -> str:
    """One table: generators as rows, the seven comparison columns in fixed order."""
    lines = []
    header = ["Generator", *MARKDOWN_COLUMNS]
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "|".join([" --- "] * len(header)) + "|")
    failures = []
    for r in reports:
        if r.status != "ok":
            failures.append(r)
        efficiency = "NaN" if r.efficiency_seconds is None else f"{r.efficiency_seconds:.0f} s"
        cells = [
            r.generator,
            _cell(r.column_fidelity),
            _cell(r.row_fidelity),
            _cell(r.synthesis),
            _cell(r.dcr_p5),
            _cell(r.nndr_p5),
            efficiency,
            _cell(r.netsimile),
        ]
        lines.append("| " + " | ".join(cells) + " |")
    if failures:
        lines.append("")
        lines.append("Failures:")
        for r in failures:
            lines.append(f"- {r.generator}: {r.error}")
    return "\n".join(lines) + "\n"


def emit_report(reports: Sequence[MetricReport], format: str, path: str | Path) -> None:
    """Write reports as JSON (stable keys) or a Markdown comparison table."""
    if not reports:
        raise SchemaError("emit_report needs at least one report")
    if format == "json":
        payload = {"reports": [report_to_dict(r) for r in reports]}
        text = json.dumps(payload, indent=2) + "\n"
    elif format == "markdown":
        text = render_markdown(reports)
    else:
        raise SchemaError(f"unknown report format {format!r}")
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise TableIOError(f"cannot write report to {path}: {exc}") from exc
