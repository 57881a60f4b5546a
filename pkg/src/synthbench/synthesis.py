"""Novelty scoring: the fraction of synthetic rows replicating no real row.

A synthetic row replicates a real row when every numeric cell sits within
margin_fraction of that real column's range and every categorical cell
matches exactly. Constant real columns therefore demand exact equality.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SchemaError
from .tabular import DataTable

__all__ = ["SynthesisConfig", "synthesis_score"]


@dataclass(frozen=True)
class SynthesisConfig:
    margin_fraction: float = 0.01

    def __post_init__(self) -> None:
        if not (0.0 <= self.margin_fraction < 1.0):
            raise SchemaError(f"margin_fraction must be in [0, 1), got {self.margin_fraction}")


def _column_tolerances(real: DataTable, margin_fraction: float) -> np.ndarray:
    tol = np.empty(len(real.schema.numeric_names))
    for k, name in enumerate(real.schema.numeric_names):
        col = real.column(name)
        tol[k] = margin_fraction * (float(col.max()) - float(col.min()))
    return tol


def synthesis_score(real: DataTable, synth: DataTable, cfg: SynthesisConfig | None = None) -> float:
    """Fraction of synthetic rows with no replicating real row, in [0, 1].

    Candidate real rows are pruned by exact categorical match and by a sorted
    window on the first numeric column; the window is padded so pruning can
    never exclude a row the exact per-cell check would accept.
    """
    if cfg is None:
        cfg = SynthesisConfig()
    if real.schema != synth.schema:
        raise SchemaError("real and synthetic tables have different schemas")
    if real.row_count == 0 or synth.row_count == 0:
        raise SchemaError("synthesis_score requires non-empty tables")

    numeric_names = real.schema.numeric_names
    categorical_names = real.schema.categorical_names
    tol = _column_tolerances(real, cfg.margin_fraction)

    real_num = (
        np.column_stack([real.column(n) for n in numeric_names])
        if numeric_names
        else np.zeros((real.row_count, 0))
    )
    synth_num = (
        np.column_stack([synth.column(n) for n in numeric_names])
        if numeric_names
        else np.zeros((synth.row_count, 0))
    )

    # Bucket real rows by their categorical tuple (decoded: dictionaries differ).
    if categorical_names:
        real_cats = np.column_stack([real.categorical_strings(n) for n in categorical_names])
        synth_cats = np.column_stack([synth.categorical_strings(n) for n in categorical_names])
        buckets: dict[tuple, list[int]] = {}
        for i in range(real.row_count):
            buckets.setdefault(tuple(real_cats[i]), []).append(i)
        bucket_arrays = {k: np.asarray(v, dtype=np.int64) for k, v in buckets.items()}
    else:
        bucket_arrays = {(): np.arange(real.row_count, dtype=np.int64)}
        synth_cats = None

    # Sort each bucket by the first numeric column for window pruning.
    sorted_buckets: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}
    for key, idx in bucket_arrays.items():
        if numeric_names:
            order = np.argsort(real_num[idx, 0], kind="stable")
            idx = idx[order]
            sorted_buckets[key] = (idx, real_num[idx, 0])
        else:
            sorted_buckets[key] = (idx, np.zeros(len(idx)))

    novel = 0
    for s in range(synth.row_count):
        key = tuple(synth_cats[s]) if categorical_names else ()
        entry = sorted_buckets.get(key)
        if entry is None:
            novel += 1
            continue
        idx, first_col = entry
        if not numeric_names:
            continue  # exact categorical match found; row replicates
        point = synth_num[s]
        # Conservative window: padding dwarfs float rounding of the bounds,
        # false positives are removed by the exact check below.
        pad = 1e-9 * (1.0 + abs(point[0]) + tol[0])
        lo = np.searchsorted(first_col, point[0] - tol[0] - pad, side="left")
        hi = np.searchsorted(first_col, point[0] + tol[0] + pad, side="right")
        if lo >= hi:
            novel += 1
            continue
        candidates = idx[lo:hi]
        diffs = np.abs(real_num[candidates] - point)
        if not bool((diffs <= tol).all(axis=1).any()):
            novel += 1
    return novel / synth.row_count
