"""Command-line surface: evaluate, generate, bench, graph.

Exit codes: 0 success, 1 I/O failure, 2 validation/schema failure,
3 generator failure. All randomness flows through --seed (default 0; never
wall-clock entropy). SYNTHBENCH_TMPDIR and SYNTHBENCH_PLUGIN_TIMEOUT
override the plugin working directory and timeout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bench import (
    ALL_METRICS,
    BenchConfig,
    MetricReport,
    emit_report,
    run_benchmark,
)
from .errors import GeneratorError, SchemaError, SynthBenchError, TableIOError
from .fidelity import fidelity_scores
from .generators import BUILTIN_KINDS, GeneratorSpec, generate_builtin
from .graph import graph_compare
from .privacy import PrivacyConfig, privacy_scores
from .synthesis import SynthesisConfig, synthesis_score
from .tabular import DataTable, fit_normalization, load_table, resolve_schema, write_table

DEFAULT_SEED = 0

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_GENERATOR = 3


def _add_io_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--delimiter", default=",", help="field delimiter of input CSV files")
    parser.add_argument("--schema", default=None, metavar="FILE",
                        help="schema override file (lines of 'name: numeric|categorical')")


def _add_seed(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="master RNG seed (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="synthbench",
                                     description="Score synthetic tabular datasets against real ones.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("evaluate", help="compare an existing synthetic file against a real file")
    p_eval.add_argument("real", help="real dataset CSV")
    p_eval.add_argument("synth", help="synthetic dataset CSV")
    p_eval.add_argument("--out", default=None, metavar="FILE", help="report path (default: stdout)")
    p_eval.add_argument("--format", choices=("json", "markdown"), default="json")
    p_eval.add_argument("--metrics", default=",".join(ALL_METRICS),
                        help="comma list of metric families: fidelity,synthesis,privacy,graph")
    p_eval.add_argument("--margin", type=float, default=0.01, help="synthesis replication margin fraction")
    p_eval.add_argument("--percentile", type=float, default=5.0, help="privacy percentile (default 5)")
    p_eval.add_argument("--graph-source", default=None, help="source-token column for graph metrics")
    p_eval.add_argument("--graph-target", default=None, help="target-token column for graph metrics")
    _add_io_flags(p_eval)
    _add_seed(p_eval)

    p_gen = sub.add_parser("generate", help="train a generator on a real file and write synthetic rows")
    p_gen.add_argument("real", help="real dataset CSV")
    p_gen.add_argument("--generator", required=True,
                       help="bootstrap|marginal|copula|plugin:<command>")
    p_gen.add_argument("--n", type=int, required=True, help="number of synthetic rows")
    p_gen.add_argument("--out", required=True, metavar="FILE", help="output CSV path")
    p_gen.add_argument("--hparam", action="append", default=[], metavar="KEY=VALUE",
                       help="hyperparameter for plugin generators (repeatable)")
    _add_io_flags(p_gen)
    _add_seed(p_gen)

    p_bench = sub.add_parser("bench", help="run the timed train/generate/score protocol")
    p_bench.add_argument("real", help="real dataset CSV")
    p_bench.add_argument("--config", default=None, metavar="FILE",
                         help="JSON config mirroring these flags (CLI wins on conflict)")
    p_bench.add_argument("--generator", action="append", default=None,
                         help="generator selector, repeatable (bootstrap|marginal|copula|plugin:<command>)")
    p_bench.add_argument("--runs", type=int, default=None, help="timed runs per generator (default 30)")
    p_bench.add_argument("--train-size", type=int, default=None, help="training subset rows (default 100000)")
    p_bench.add_argument("--gen-size", type=int, default=None, help="synthetic rows per run (default 10000)")
    p_bench.add_argument("--metrics", default=None, help="comma list of metric families")
    p_bench.add_argument("--margin", type=float, default=None, help="synthesis replication margin fraction")
    p_bench.add_argument("--percentile", type=float, default=None, help="privacy percentile")
    p_bench.add_argument("--graph-source", default=None, help="source-token column for graph metrics")
    p_bench.add_argument("--graph-target", default=None, help="target-token column for graph metrics")
    p_bench.add_argument("--holdout", action="store_true", default=None,
                         help="score against held-out rows instead of the training subset")
    p_bench.add_argument("--parallel-metrics", action="store_true", default=None,
                         help="compute metric families concurrently per finished run")
    p_bench.add_argument("--plugin-timeout", type=float, default=None, help="plugin timeout seconds (default 7200)")
    p_bench.add_argument("--dataset-id", default=None, help="dataset label used in reports")
    p_bench.add_argument("--out-json", default="bench_report.json", metavar="FILE")
    p_bench.add_argument("--out-md", default="bench_report.md", metavar="FILE")
    _add_io_flags(p_bench)
    _add_seed(p_bench)
    p_bench.set_defaults(seed=None)  # so a config-file seed is distinguishable from the default

    p_graph = sub.add_parser("graph", help="compare the transaction graphs of two files")
    p_graph.add_argument("real", help="real dataset CSV")
    p_graph.add_argument("synth", help="synthetic dataset CSV")
    p_graph.add_argument("--graph-source", required=True, help="source-token column")
    p_graph.add_argument("--graph-target", required=True, help="target-token column")
    p_graph.add_argument("--out", default=None, metavar="FILE", help="JSON output path (default: stdout)")
    _add_io_flags(p_graph)
    _add_seed(p_graph)

    return parser


def _load(path: str, args) -> DataTable:
    schema = resolve_schema(path, override_path=args.schema, delimiter=args.delimiter)
    return load_table(path, schema=schema, delimiter=args.delimiter).table


def _parse_metrics(text: str) -> tuple[str, ...]:
    metrics = tuple(m.strip() for m in text.split(",") if m.strip())
    unknown = set(metrics) - set(ALL_METRICS)
    if unknown:
        raise SchemaError(f"unknown metrics: {sorted(unknown)} (valid: {', '.join(ALL_METRICS)})")
    return metrics


def _parse_hparams(pairs: list[str]) -> dict[str, str]:
    out = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise SchemaError(f"--hparam expects KEY=VALUE, got {pair!r}")
        out[key] = value
    return out


def cmd_evaluate(args) -> int:
    real = _load(args.real, args)
    synth = _load(args.synth, args)
    if real.schema.names != synth.schema.names:
        raise SchemaError(
            f"real and synthetic headers differ: {real.schema.names} vs {synth.schema.names}"
        )
    if real.schema != synth.schema:
        raise SchemaError("real and synthetic column kinds differ (use --schema to pin them)")
    metrics = _parse_metrics(args.metrics)

    result: dict = {"real": args.real, "synth": args.synth, "seed": args.seed}
    if "fidelity" in metrics:
        fid = fidelity_scores(real, synth)
        result["column_fidelity"] = fid.column_wise
        result["row_fidelity"] = fid.row_wise
        result["per_column_fidelity"] = fid.per_column
        result["per_pair_fidelity"] = {f"{a}|{b}": v for (a, b), v in fid.per_pair.items()}
        if fid.row_wise is None:
            result["row_fidelity_reason"] = fid.row_wise_reason
    if "synthesis" in metrics:
        result["synthesis"] = synthesis_score(real, synth, SynthesisConfig(args.margin))
    if "privacy" in metrics:
        params = fit_normalization(real)
        priv = privacy_scores(real, synth, params, PrivacyConfig(args.percentile))
        result["dcr_p5"] = priv.dcr_p
        result["nndr_p5"] = priv.nndr_p
    if "graph" in metrics and args.graph_source and args.graph_target:
        cmp = graph_compare(real, synth, args.graph_source, args.graph_target)
        result["netsimile"] = cmp.distance
        result["graph_diagnostics"] = {
            "real_nodes": cmp.real_nodes,
            "real_edges": cmp.real_edges,
            "synth_nodes": cmp.synth_nodes,
            "synth_edges": cmp.synth_edges,
            "single_cluster_flag": cmp.single_cluster_flag,
            "reason": cmp.reason,
        }

    if args.format == "json":
        text = json.dumps(result, indent=2) + "\n"
    else:
        keys = [k for k in ("column_fidelity", "row_fidelity", "synthesis", "dcr_p5", "nndr_p5", "netsimile")
                if k in result]
        head = "| " + " | ".join(keys) + " |"
        sep = "|" + "|".join([" --- "] * len(keys)) + "|"
        cells = ["NaN" if result[k] is None else f"{result[k]:.5f}" for k in keys]
        text = head + "\n" + sep + "\n| " + " | ".join(cells) + " |\n"
    _write_or_print(text, args.out)
    return EXIT_OK


def _write_or_print(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        try:
            Path(out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise TableIOError(f"cannot write {out}: {exc}") from exc


def cmd_generate(args) -> int:
    real = _load(args.real, args)
    spec = GeneratorSpec.parse(args.generator, seed=args.seed, hyperparams=_parse_hparams(args.hparam))
    if spec.kind == "plugin":
        from .bench import timed_generate

        synth, _ = timed_generate(spec, real, args.n, args.seed)
    else:
        synth = generate_builtin(spec.kind, real, args.n, args.seed)
    write_table(synth, args.out, delimiter=args.delimiter)
    return EXIT_OK


def _load_bench_config(args) -> tuple[BenchConfig, list[GeneratorSpec]]:
    file_cfg: dict = {}
    if args.config:
        try:
            file_cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise TableIOError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise SchemaError(f"config {args.config} is not valid JSON: {exc}") from exc

    def pick(cli_value, key, default):
        if cli_value is not None:
            return cli_value
        return file_cfg.get(key, default)

    metrics_text = pick(args.metrics, "metrics", None)
    if isinstance(metrics_text, list):
        metrics = tuple(metrics_text)
    elif isinstance(metrics_text, str):
        metrics = _parse_metrics(metrics_text)
    else:
        metrics = ALL_METRICS

    cfg = BenchConfig(
        runs=int(pick(args.runs, "runs", 30)),
        train_size=int(pick(args.train_size, "train_size", 100_000)),
        gen_size=int(pick(args.gen_size, "gen_size", 10_000)),
        seed=int(pick(args.seed, "seed", DEFAULT_SEED)),
        dataset_id=str(pick(args.dataset_id, "dataset_id", Path(args.real).stem)),
        metrics=metrics,
        margin=float(pick(args.margin, "margin", 0.01)),
        percentile=float(pick(args.percentile, "percentile", 5.0)),
        graph_source=pick(args.graph_source, "graph_source", None),
        graph_target=pick(args.graph_target, "graph_target", None),
        holdout=bool(pick(args.holdout, "holdout", False)),
        parallel_metrics=bool(pick(args.parallel_metrics, "parallel_metrics", False)),
        plugin_timeout=float(pick(args.plugin_timeout, "plugin_timeout", 7200.0)),
        grids={g: dict(params) for g, params in file_cfg.get("grids", {}).items()},
    )

    specs: list[GeneratorSpec] = []
    if args.generator:
        for idx, text in enumerate(args.generator):
            specs.append(GeneratorSpec.parse(text, seed=_spec_seed(cfg.seed, idx)))
    else:
        for idx, entry in enumerate(file_cfg.get("generators", [])):
            if isinstance(entry, str):
                specs.append(GeneratorSpec.parse(entry, seed=_spec_seed(cfg.seed, idx)))
            else:
                specs.append(
                    GeneratorSpec(
                        kind=entry["kind"],
                        name=entry.get("name", ""),
                        command=entry.get("command"),
                        hyperparams=dict(entry.get("hyperparams", {})),
                        seed=int(entry.get("seed", _spec_seed(cfg.seed, idx))),
                    )
                )
    if not specs:
        raise SchemaError("no generators selected (use --generator or the config file)")
    return cfg, specs


def _spec_seed(master_seed: int, spec_index: int) -> int:
    return int(np.random.SeedSequence(master_seed, spawn_key=(spec_index,)).generate_state(1, dtype=np.uint64)[0])


def cmd_bench(args) -> int:
    cfg, specs = _load_bench_config(args)
    real = _load(args.real, args)
    reports = run_benchmark(real, specs, cfg)
    emit_report(reports, "json", args.out_json)
    emit_report(reports, "markdown", args.out_md)
    ok = [r for r in reports if r.status == "ok"]
    for r in reports:
        if r.status != "ok":
            sys.stderr.write(f"generator {r.generator} failed: {r.error}\n")
    if not ok:
        raise GeneratorError("all generators failed")
    return EXIT_OK


def cmd_graph(args) -> int:
    real = _load(args.real, args)
    synth = _load(args.synth, args)
    cmp = graph_compare(real, synth, args.graph_source, args.graph_target)
    payload = {
        "netsimile": cmp.distance,
        "real_nodes": cmp.real_nodes,
        "real_edges": cmp.real_edges,
        "synth_nodes": cmp.synth_nodes,
        "synth_edges": cmp.synth_edges,
        "single_cluster_flag": cmp.single_cluster_flag,
        "reason": cmp.reason,
        "real_signature": list(cmp.real_signature) if cmp.real_signature else None,
        "synth_signature": list(cmp.synth_signature) if cmp.synth_signature else None,
    }
    _write_or_print(json.dumps(payload, indent=2) + "\n", args.out)
    return EXIT_OK


_COMMANDS = {
    "evaluate": cmd_evaluate,
    "generate": cmd_generate,
    "bench": cmd_bench,
    "graph": cmd_graph,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except TableIOError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO
    except (SchemaError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except GeneratorError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_GENERATOR
    except SynthBenchError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
