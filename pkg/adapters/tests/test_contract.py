"""Black-box plugin-protocol conformance, exercised purely over the wire."""

import csv
import json
import subprocess
import sys

import pytest

from conftest import FAST_HPARAMS

MODELS = ("ctgan", "tvae", "wgan", "findiff")


def run_adapter(model, train, n, out, seed, hparams_path=None, extra=()):
    argv = [sys.executable, "-m", "dl_adapters", model,
            "--train", str(train), "--n", str(n), "--out", str(out), "--seed", str(seed)]
    if hparams_path:
        argv += ["--hparams", str(hparams_path)]
    argv += list(extra)
    return subprocess.run(argv, capture_output=True, text=True, timeout=600)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        return header, list(reader)


@pytest.fixture(scope="session")
def fast_hparams(tmp_path_factory):
    path = tmp_path_factory.mktemp("hp") / "fast.json"
    path.write_text(json.dumps(FAST_HPARAMS), encoding="utf-8")
    return path


@pytest.mark.parametrize("model", MODELS)
class TestWireContract:
    def test_writes_training_header_and_row_count(self, model, toy_csv, tmp_path, fast_hparams):
        out = tmp_path / f"{model}.csv"
        result = run_adapter(model, toy_csv, 37, out, seed=7, hparams_path=fast_hparams)
        assert result.returncode == 0, result.stderr
        header, rows = read_csv(out)
        train_header, train_rows = read_csv(toy_csv)
        assert header == train_header
        assert len(rows) == 37

    def test_numeric_cells_finite_and_categories_known(self, model, toy_csv, tmp_path, fast_hparams):
        out = tmp_path / f"{model}.csv"
        assert run_adapter(model, toy_csv, 25, out, seed=8, hparams_path=fast_hparams).returncode == 0
        header, rows = read_csv(out)
        _, train_rows = read_csv(toy_csv)
        channels = {r[3] for r in train_rows}
        statuses = {r[4] for r in train_rows}
        import math

        for row in rows:
            for j in (0, 1, 2):
                value = float(row[j])
                assert math.isfinite(value)
            assert row[3] in channels
            assert row[4] in statuses

    def test_same_seed_reproduces_output(self, model, toy_csv, tmp_path, fast_hparams):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert run_adapter(model, toy_csv, 15, a, seed=99, hparams_path=fast_hparams).returncode == 0
        assert run_adapter(model, toy_csv, 15, b, seed=99, hparams_path=fast_hparams).returncode == 0
        assert a.read_bytes() == b.read_bytes()


class TestFailureModes:
    def test_invalid_model_name_rejected(self, toy_csv, tmp_path):
        result = subprocess.run(
            [sys.executable, "-m", "dl_adapters", "quantumgan",
             "--train", str(toy_csv), "--n", "5", "--out", str(tmp_path / "x.csv"), "--seed", "1"],
            capture_output=True, text=True)
        assert result.returncode != 0
        assert result.stderr.strip()

    def test_unknown_hyperparameter_rejected(self, toy_csv, tmp_path):
        hp = tmp_path / "hp.json"
        hp.write_text(json.dumps({"warp_factor": 9}), encoding="utf-8")
        result = run_adapter("tvae", toy_csv, 5, tmp_path / "x.csv", seed=1, hparams_path=hp)
        assert result.returncode != 0
        assert "warp_factor" in result.stderr

    def test_bad_hyperparameter_type_rejected(self, toy_csv, tmp_path):
        hp = tmp_path / "hp.json"
        hp.write_text(json.dumps({"epochs": "many"}), encoding="utf-8")
        result = run_adapter("wgan", toy_csv, 5, tmp_path / "x.csv", seed=1, hparams_path=hp)
        assert result.returncode != 0
        assert "epochs" in result.stderr

    def test_missing_training_file_rejected(self, tmp_path):
        result = run_adapter("tvae", tmp_path / "ghost.csv", 5, tmp_path / "x.csv", seed=1)
        assert result.returncode != 0
        assert result.stderr.strip().count("\n") == 0  # one-line diagnostic

    def test_help_lists_defaults(self):
        result = subprocess.run([sys.executable, "-m", "dl_adapters", "--help"],
                                capture_output=True, text=True)
        assert result.returncode == 0
        assert "hyperparameter defaults" in result.stdout
        for model in MODELS:
            assert model in result.stdout
