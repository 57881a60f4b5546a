import json
import sys
from pathlib import Path

import numpy as np
import pytest

from synthbench.cli import build_parser, main
from synthbench.tabular import load_table, write_table

from helpers import make_schema, make_table, random_mixed_table

PLUGIN_DIR = Path(__file__).parent / "plugins"


@pytest.fixture
def real_csv(tmp_path, rng):
    table = random_mixed_table(rng, 400, 2, 1)
    path = tmp_path / "real.csv"
    write_table(table, path)
    return path


@pytest.fixture
def graph_csv(tmp_path, rng):
    schema = make_schema(("src", "categorical"), ("dst", "categorical"), ("amt", "numeric"))
    n = 300
    table = make_table(
        schema,
        src=[f"a{int(v)}" for v in rng.integers(0, 30, size=n)],
        dst=[f"a{int(v)}" for v in rng.integers(0, 30, size=n)],
        amt=rng.uniform(0, 100, size=n),
    )
    path = tmp_path / "graph.csv"
    write_table(table, path)
    return path


class TestHelp:
    def test_every_documented_flag_listed(self, capsys):
        parser = build_parser()
        flag_expectations = {
            "evaluate": ["--metrics", "--margin", "--percentile", "--graph-source",
                         "--graph-target", "--seed", "--delimiter", "--schema", "--format", "--out"],
            "generate": ["--generator", "--n", "--out", "--hparam", "--seed", "--delimiter", "--schema"],
            "bench": ["--config", "--generator", "--runs", "--train-size", "--gen-size",
                      "--metrics", "--margin", "--percentile", "--graph-source", "--graph-target",
                      "--holdout", "--parallel-metrics", "--plugin-timeout", "--seed",
                      "--out-json", "--out-md"],
            "graph": ["--graph-source", "--graph-target", "--out", "--seed"],
        }
        for sub, flags in flag_expectations.items():
            with pytest.raises(SystemExit):
                parser.parse_args([sub, "--help"])
            text = capsys.readouterr().out
            for flag in flags:
                assert flag in text, f"{sub} help missing {flag}"


class TestEvaluate:
    def test_self_evaluation_identity(self, real_csv, tmp_path):
        out = tmp_path / "report.json"
        code = main(["evaluate", str(real_csv), str(real_csv), "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["column_fidelity"] == 1.0
        assert report["synthesis"] == 0.0
        assert report["dcr_p5"] == 0.0
        assert report["nndr_p5"] == 0.0

    def test_metric_selection_limits_fields(self, real_csv, tmp_path):
        out = tmp_path / "report.json"
        code = main(["evaluate", str(real_csv), str(real_csv), "--metrics", "fidelity", "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert "column_fidelity" in report
        assert "synthesis" not in report and "dcr_p5" not in report

    def test_netsimile_absent_without_graph_flags(self, real_csv, tmp_path):
        out = tmp_path / "report.json"
        main(["evaluate", str(real_csv), str(real_csv), "--out", str(out)])
        assert "netsimile" not in json.loads(out.read_text())

    def test_graph_metrics_with_flags(self, graph_csv, tmp_path):
        out = tmp_path / "report.json"
        code = main(["evaluate", str(graph_csv), str(graph_csv),
                     "--graph-source", "src", "--graph-target", "dst", "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["netsimile"] == 0.0

    def test_schema_mismatch_exits_2(self, real_csv, tmp_path):
        other = tmp_path / "other.csv"
        other.write_text("a,b\n1,2\n", encoding="utf-8")
        assert main(["evaluate", str(real_csv), str(other)]) == 2

    def test_missing_file_exits_1(self, real_csv, tmp_path):
        assert main(["evaluate", str(real_csv), str(tmp_path / "nope.csv")]) == 1

    def test_markdown_format(self, real_csv, tmp_path):
        out = tmp_path / "report.md"
        code = main(["evaluate", str(real_csv), str(real_csv), "--format", "markdown", "--out", str(out)])
        assert code == 0
        assert "column_fidelity" in out.read_text()


class TestGenerate:
    @pytest.mark.parametrize("generator", ["bootstrap", "marginal", "copula"])
    def test_builtin_generators_write_loadable_csv(self, real_csv, tmp_path, generator):
        out = tmp_path / f"{generator}.csv"
        code = main(["generate", str(real_csv), "--generator", generator,
                     "--n", "25", "--out", str(out), "--seed", "5"])
        assert code == 0
        real = load_table(real_csv).table
        synth = load_table(out, schema=real.schema).table
        assert synth.row_count == 25

    def test_bootstrap_rows_verbatim(self, real_csv, tmp_path):
        out = tmp_path / "boot.csv"
        main(["generate", str(real_csv), "--generator", "bootstrap", "--n", "5", "--out", str(out)])
        real = load_table(real_csv).table
        synth = load_table(out, schema=real.schema).table
        real_rows = {real.row_tuple(i) for i in range(real.row_count)}
        assert all(synth.row_tuple(i) in real_rows for i in range(5))

    def test_same_seed_byte_identical(self, real_csv, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert main(["generate", str(real_csv), "--generator", "copula",
                         "--n", "50", "--out", str(out), "--seed", "77"]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_plugin_failure_exits_3(self, real_csv, tmp_path):
        cmd = f"plugin:{sys.executable} {PLUGIN_DIR / 'broken_plugin.py'}"
        code = main(["generate", str(real_csv), "--generator", cmd,
                     "--n", "5", "--out", str(tmp_path / "x.csv")])
        assert code == 3

    def test_bad_hparam_syntax_exits_2(self, real_csv, tmp_path):
        code = main(["generate", str(real_csv), "--generator", "bootstrap", "--n", "5",
                     "--out", str(tmp_path / "x.csv"), "--hparam", "notkeyvalue"])
        assert code == 2

    def test_input_file_not_mutated(self, real_csv, tmp_path):
        before = real_csv.read_bytes()
        main(["generate", str(real_csv), "--generator", "bootstrap", "--n", "5",
              "--out", str(tmp_path / "y.csv")])
        assert real_csv.read_bytes() == before


class TestBench:
    def test_single_bootstrap_run(self, real_csv, tmp_path):
        out_json = tmp_path / "r.json"
        out_md = tmp_path / "r.md"
        code = main(["bench", str(real_csv), "--generator", "bootstrap", "--runs", "1",
                     "--train-size", "200", "--gen-size", "80",
                     "--out-json", str(out_json), "--out-md", str(out_md)])
        assert code == 0
        md = out_md.read_text()
        assert md.splitlines()[0].count("|") == 9
        report = json.loads(out_json.read_text())["reports"][0]
        assert report["synthesis"] == 0.0

    def test_config_file_with_cli_override(self, real_csv, tmp_path):
        config = tmp_path / "bench.json"
        config.write_text(json.dumps({
            "runs": 2,
            "train_size": 150,
            "gen_size": 50,
            "seed": 9,
            "generators": ["bootstrap", "marginal"],
        }), encoding="utf-8")
        out_json = tmp_path / "r.json"
        code = main(["bench", str(real_csv), "--config", str(config), "--runs", "1",
                     "--out-json", str(out_json), "--out-md", str(tmp_path / "r.md")])
        assert code == 0
        reports = json.loads(out_json.read_text())["reports"]
        assert [r["generator"] for r in reports] == ["bootstrap", "marginal"]
        assert all(r["status"] == "ok" for r in reports)

    def test_bad_plugin_plus_bootstrap_still_succeeds(self, real_csv, tmp_path):
        config = tmp_path / "bench.json"
        config.write_text(json.dumps({
            "runs": 1, "train_size": 100, "gen_size": 30,
            "generators": [
                {"kind": "plugin", "name": "broken",
                 "command": f"{sys.executable} {PLUGIN_DIR / 'broken_plugin.py'}"},
                "bootstrap",
            ],
        }), encoding="utf-8")
        out_json = tmp_path / "r.json"
        code = main(["bench", str(real_csv), "--config", str(config),
                     "--out-json", str(out_json), "--out-md", str(tmp_path / "r.md")])
        assert code == 0
        reports = json.loads(out_json.read_text())["reports"]
        statuses = {r["generator"]: r["status"] for r in reports}
        assert statuses == {"broken": "failed", "bootstrap": "ok"}

    def test_all_failing_exits_3(self, real_csv, tmp_path):
        cmd = f"plugin:{sys.executable} {PLUGIN_DIR / 'broken_plugin.py'}"
        code = main(["bench", str(real_csv), "--generator", cmd, "--runs", "1",
                     "--train-size", "100", "--gen-size", "30",
                     "--out-json", str(tmp_path / "r.json"), "--out-md", str(tmp_path / "r.md")])
        assert code == 3

    def test_no_generators_exits_2(self, real_csv, tmp_path):
        assert main(["bench", str(real_csv), "--out-json", str(tmp_path / "r.json"),
                     "--out-md", str(tmp_path / "r.md")]) == 2


class TestGraphCommand:
    def test_self_compare(self, graph_csv, tmp_path):
        out = tmp_path / "g.json"
        code = main(["graph", str(graph_csv), str(graph_csv),
                     "--graph-source", "src", "--graph-target", "dst", "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["netsimile"] == 0.0
        assert len(payload["real_signature"]) == 35

    def test_missing_column_exits_2(self, graph_csv, tmp_path):
        code = main(["graph", str(graph_csv), str(graph_csv),
                     "--graph-source", "src", "--graph-target", "ghost"])
        assert code == 2
