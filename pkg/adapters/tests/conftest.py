import csv

import numpy as np
import pytest

TOY_ROWS = 1000

FAST_HPARAMS = {"epochs": 4}  # wire-contract tests don't need a converged model


def write_toy_table(path, rows=TOY_ROWS, seed=123):
    """The 5-column toy table: 3 numeric + 2 categorical, transaction-flavored."""
    rng = np.random.default_rng(seed)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["amount", "balance", "score", "channel", "status"])
        for _ in range(rows):
            writer.writerow([
                f"{rng.lognormal(mean=2.0, sigma=0.8):.6f}",
                f"{rng.normal(1000.0, 250.0):.4f}",
                f"{rng.uniform(0.0, 1.0):.6f}",
                f"ch{int(rng.integers(0, 4))}",
                f"s{int(rng.integers(0, 3))}",
            ])
    return path


@pytest.fixture(scope="session")
def toy_csv(tmp_path_factory):
    return write_toy_table(tmp_path_factory.mktemp("data") / "toy.csv")
