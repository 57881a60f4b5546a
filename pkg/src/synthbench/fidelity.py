"""Column-wise and row-wise fidelity between a real and a synthetic table.

Column scores: numeric columns use the exact two-sample KS statistic,
reported as the complement 1 - KS so that higher means more similar;
categorical columns use the total-variation complement. Row scores compare
pairwise Pearson correlations: 1 - |rho_real - rho_synth| / 2 per
numeric-numeric pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import SchemaError
from .tabular import ColumnKind, DataTable

__all__ = ["FidelityScores", "ks_statistic", "column_fidelity", "row_fidelity", "fidelity_scores"]


@dataclass(frozen=True)
class FidelityScores:
    column_wise: float
    row_wise: float | None
    per_column: dict[str, float]
    per_pair: dict[tuple[str, str], float]
    row_wise_reason: str | None = None


def ks_statistic(a, b) -> float:
    """Exact two-sample KS statistic: sup |ECDF_a - ECDF_b| over the merged support."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise SchemaError("ks_statistic requires non-empty samples")
    a_sorted = np.sort(a)
    b_sorted = np.sort(b)
    support = np.concatenate([a_sorted, b_sorted])
    cdf_a = np.searchsorted(a_sorted, support, side="right") / a.size
    cdf_b = np.searchsorted(b_sorted, support, side="right") / b.size
    return float(np.abs(cdf_a - cdf_b).max())


def _total_variation(real: DataTable, synth: DataTable, name: str) -> float:
    """TV distance between the two empirical category distributions (union support)."""
    tv = 0.0
    real_strings = real.categorical_strings(name)
    synth_strings = synth.categorical_strings(name)
    real_counts: dict[str, int] = {}
    synth_counts: dict[str, int] = {}
    for s in real_strings:
        real_counts[s] = real_counts.get(s, 0) + 1
    for s in synth_strings:
        synth_counts[s] = synth_counts.get(s, 0) + 1
    for cat in set(real_counts) | set(synth_counts):
        p = real_counts.get(cat, 0) / real.row_count
        q = synth_counts.get(cat, 0) / synth.row_count
        tv += abs(p - q)
    return 0.5 * tv


def _check_pair(real: DataTable, synth: DataTable) -> None:
    if real.schema != synth.schema:
        raise SchemaError("real and synthetic tables have different schemas")
    if real.row_count == 0 or synth.row_count == 0:
        raise SchemaError("fidelity requires non-empty tables")


def column_fidelity(real: DataTable, synth: DataTable) -> tuple[dict[str, float], float]:
    """Per-column similarity scores (1 - KS or 1 - TV) and their mean, in schema order."""
    _check_pair(real, synth)
    per_column: dict[str, float] = {}
    for col in real.schema.columns:
        if col.kind is ColumnKind.NUMERIC:
            score = 1.0 - ks_statistic(real.column(col.name), synth.column(col.name))
        else:
            score = 1.0 - _total_variation(real, synth, col.name)
        per_column[col.name] = score
    mean = float(np.mean(list(per_column.values())))
    return per_column, mean


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    """Sample Pearson correlation; 0 when either column has zero variance."""
    xd = x - x.mean()
    yd = y - y.mean()
    sx = float(np.sqrt(np.dot(xd, xd)))
    sy = float(np.sqrt(np.dot(yd, yd)))
    if sx == 0.0 or sy == 0.0:
        return 0.0
    r = float(np.dot(xd, yd) / (sx * sy))
    return min(1.0, max(-1.0, r))


def row_fidelity(real: DataTable, synth: DataTable) -> tuple[dict[tuple[str, str], float], float | None]:
    """Pair scores 1 - |rho_real - rho_synth|/2 over numeric column pairs, plus mean.

    With fewer than two numeric columns there are no pairs; the result is
    undefined and reported as (empty map, None) rather than 0.
    """
    _check_pair(real, synth)
    numeric = real.schema.numeric_names
    if len(numeric) < 2:
        return {}, None
    per_pair: dict[tuple[str, str], float] = {}
    for i, j in combinations(numeric, 2):
        rho_real = _pearson(real.column(i), real.column(j))
        rho_synth = _pearson(synth.column(i), synth.column(j))
        per_pair[(i, j)] = 1.0 - abs(rho_real - rho_synth) / 2.0
    mean = float(np.mean(list(per_pair.values())))
    return per_pair, mean


def fidelity_scores(real: DataTable, synth: DataTable) -> FidelityScores:
    per_column, col_mean = column_fidelity(real, synth)
    per_pair, row_mean = row_fidelity(real, synth)
    reason = "fewer than 2 numeric columns" if row_mean is None else None
    return FidelityScores(col_mean, row_mean, per_column, per_pair, reason)
