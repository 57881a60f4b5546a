"""CSV I/O and mixed-type encoding shared by all adapter models.

The training file arrives over the plugin wire contract: UTF-8 CSV, header
row, numeric and categorical columns. Column kinds are inferred the same way
the harness infers them (a column is numeric iff every cell parses as a
finite real), so both sides agree on the schema without sharing code.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


class AdapterError(Exception):
    """Any adapter failure; the CLI turns it into a one-line stderr diagnostic."""


def _parse_float(cell: str) -> float | None:
    try:
        value = float(cell)
    except ValueError:
        return None
    return value if np.isfinite(value) else None


@dataclass
class TableData:
    header: list[str]
    numeric_cols: list[str]
    categorical_cols: list[str]
    numeric: np.ndarray  # (rows, n_numeric) float64
    codes: np.ndarray  # (rows, n_categorical) int64
    categories: list[list[str]]  # per categorical column

    @property
    def row_count(self) -> int:
        return max(self.numeric.shape[0], self.codes.shape[0])


def load_csv(path: str) -> TableData:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise AdapterError(f"{path}: empty training file")
        rows = [row for row in reader if len(row) == len(header)]
    if not rows:
        raise AdapterError(f"{path}: no training rows")

    n_cols = len(header)
    is_numeric = [all(_parse_float(row[j]) is not None for row in rows) for j in range(n_cols)]

    numeric_cols = [header[j] for j in range(n_cols) if is_numeric[j]]
    categorical_cols = [header[j] for j in range(n_cols) if not is_numeric[j]]
    numeric = np.array(
        [[float(row[j]) for j in range(n_cols) if is_numeric[j]] for row in rows], dtype=np.float64
    ).reshape(len(rows), len(numeric_cols))

    categories: list[list[str]] = []
    codes = np.zeros((len(rows), len(categorical_cols)), dtype=np.int64)
    k = 0
    for j in range(n_cols):
        if is_numeric[j]:
            continue
        seen: dict[str, int] = {}
        cats: list[str] = []
        for i, row in enumerate(rows):
            value = row[j]
            if value not in seen:
                seen[value] = len(cats)
                cats.append(value)
            codes[i, k] = seen[value]
        categories.append(cats)
        k += 1
    return TableData(header, numeric_cols, categorical_cols, numeric, codes, categories)


def write_csv(path: str, data: TableData, numeric: np.ndarray, codes: np.ndarray) -> None:
    """Write generated rows with the training header and column order."""
    n = numeric.shape[0] if numeric.size else codes.shape[0]
    columns: dict[str, list[str]] = {}
    for j, name in enumerate(data.numeric_cols):
        columns[name] = [repr(float(v)) for v in numeric[:, j]]
    for j, name in enumerate(data.categorical_cols):
        cats = data.categories[j]
        columns[name] = [cats[int(c)] for c in codes[:, j]]
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(data.header)
        for i in range(n):
            writer.writerow([columns[name][i] for name in data.header])


class MixedEncoder:
    """Numeric scaling plus one-hot categorical blocks, with an inverse.

    scaling="minmax" maps numerics to [-1, 1] (pairs with tanh generators);
    scaling="zscore" standardizes (pairs with VAE / diffusion outputs, which
    are clamped before decoding so values stay finite).
    """

    CLAMP_Z = 6.0

    def __init__(self, data: TableData, scaling: str):
        if scaling not in ("minmax", "zscore"):
            raise AdapterError(f"unknown scaling {scaling!r}")
        self.data = data
        self.scaling = scaling
        num = data.numeric
        if num.size:
            self.col_min = num.min(axis=0)
            self.col_max = num.max(axis=0)
            self.col_mean = num.mean(axis=0)
            col_std = num.std(axis=0)
            self.col_std = np.where(col_std > 0, col_std, 1.0)
        self.cat_sizes = [len(c) for c in data.categories]
        self.width = len(data.numeric_cols) + sum(self.cat_sizes)

    def encode(self) -> np.ndarray:
        parts = []
        if self.data.numeric_cols:
            num = self.data.numeric
            if self.scaling == "minmax":
                span = np.where(self.col_max > self.col_min, self.col_max - self.col_min, 1.0)
                parts.append(2.0 * (num - self.col_min) / span - 1.0)
            else:
                parts.append((num - self.col_mean) / self.col_std)
        for j, size in enumerate(self.cat_sizes):
            block = np.zeros((self.data.row_count, size))
            block[np.arange(self.data.row_count), self.data.codes[:, j]] = 1.0
            parts.append(block)
        return np.hstack(parts).astype(np.float32)

    def decode(self, matrix: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        """Invert to (numeric values, categorical codes); categoricals by argmax."""
        matrix = np.asarray(matrix, dtype=np.float64)
        n_num = len(self.data.numeric_cols)
        num_block = matrix[:, :n_num]
        if n_num:
            if self.scaling == "minmax":
                clipped = np.clip(num_block, -1.0, 1.0)
                span = np.where(self.col_max > self.col_min, self.col_max - self.col_min, 1.0)
                numeric = (clipped + 1.0) / 2.0 * span + self.col_min
            else:
                clipped = np.clip(num_block, -self.CLAMP_Z, self.CLAMP_Z)
                numeric = clipped * self.col_std + self.col_mean
        else:
            numeric = np.zeros((matrix.shape[0], 0))
        codes = np.zeros((matrix.shape[0], len(self.cat_sizes)), dtype=np.int64)
        offset = n_num
        for j, size in enumerate(self.cat_sizes):
            block = matrix[:, offset : offset + size]
            codes[:, j] = np.argmax(block, axis=1)
            offset += size
        return numeric, codes

    def empirical_code_sampler(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Category codes drawn from the training frequencies (fallback path)."""
        codes = np.zeros((n, len(self.cat_sizes)), dtype=np.int64)
        for j in range(len(self.cat_sizes)):
            idx = rng.integers(0, self.data.row_count, size=n)
            codes[:, j] = self.data.codes[idx, j]
        return codes
