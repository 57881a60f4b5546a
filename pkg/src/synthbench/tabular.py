"""Typed columnar tables: loading, schema inference, normalization, distance encoding.

Every other module consumes `DataTable`. Tables are immutable after
construction (column arrays are write-protected), so concurrent reads are
safe.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import SchemaError, TableIOError

__all__ = [
    "ColumnKind",
    "Column",
    "TableSchema",
    "DataTable",
    "NormalizationParams",
    "LoadResult",
    "load_table",
    "infer_schema",
    "read_schema_file",
    "resolve_schema",
    "fit_normalization",
    "encode_for_distance",
    "write_table",
]

DEFAULT_SAMPLE_ROWS = 10_000

# Integer/decimal literals with optional scientific notation; '.' separator,
# locale independent. Deliberately excludes inf/nan/hex/underscores.
_NUMERIC_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


class ColumnKind(Enum):
    NUMERIC = "numeric"
    CATEGORICAL = "categorical"


@dataclass(frozen=True)
class Column:
    name: str
    kind: ColumnKind


@dataclass(frozen=True)
class TableSchema:
    """Ordered (name, kind) column list; names unique and non-empty."""

    columns: tuple[Column, ...]

    def __post_init__(self) -> None:
        if not self.columns:
            raise SchemaError("schema must have at least one column")
        seen: set[str] = set()
        for col in self.columns:
            if not col.name:
                raise SchemaError("empty column name in schema")
            if col.name in seen:
                raise SchemaError(f"duplicate column name: {col.name!r}")
            seen.add(col.name)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    @property
    def numeric_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns if c.kind is ColumnKind.NUMERIC)

    @property
    def categorical_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns if c.kind is ColumnKind.CATEGORICAL)

    def kind_of(self, name: str) -> ColumnKind:
        for c in self.columns:
            if c.name == name:
                return c.kind
        raise SchemaError(f"no such column: {name!r}")


def parse_numeric(cell: str) -> float | None:
    """Parse a cell as a finite real; None when missing or unparseable."""
    text = cell.strip()
    if not text or not _NUMERIC_RE.match(text):
        return None
    value = float(text)
    if not np.isfinite(value):
        return None
    return value


@dataclass
class DataTable:
    """Immutable columnar table.

    Numeric columns are float64 arrays of finite values; categorical columns
    are integer code arrays indexing a per-column category tuple.
    """

    schema: TableSchema
    row_count: int
    _numeric: dict[str, np.ndarray] = field(repr=False)
    _codes: dict[str, np.ndarray] = field(repr=False)
    _categories: dict[str, tuple[str, ...]] = field(repr=False)

    def __post_init__(self) -> None:
        for name in self.schema.numeric_names:
            arr = self._numeric[name]
            if arr.shape != (self.row_count,):
                raise SchemaError(f"column {name!r} has {arr.shape[0]} rows, expected {self.row_count}")
            if not np.all(np.isfinite(arr)):
                raise SchemaError(f"non-finite value in numeric column {name!r}")
            arr.flags.writeable = False
        for name in self.schema.categorical_names:
            codes = self._codes[name]
            if codes.shape != (self.row_count,):
                raise SchemaError(f"column {name!r} has {codes.shape[0]} rows, expected {self.row_count}")
            n_cats = len(self._categories[name])
            if self.row_count and (codes.min() < 0 or codes.max() >= n_cats):
                raise SchemaError(f"category code out of range in column {name!r}")
            codes.flags.writeable = False

    @classmethod
    def from_columns(cls, schema: TableSchema, columns: Mapping[str, Sequence]) -> "DataTable":
        """Build a table from per-column values (floats or category strings)."""
        if set(columns) != set(schema.names):
            raise SchemaError("column set does not match schema")
        numeric: dict[str, np.ndarray] = {}
        codes: dict[str, np.ndarray] = {}
        categories: dict[str, tuple[str, ...]] = {}
        row_count = None
        for col in schema.columns:
            values = columns[col.name]
            n = len(values)
            if row_count is None:
                row_count = n
            elif n != row_count:
                raise SchemaError(f"column {col.name!r} has {n} rows, expected {row_count}")
            if col.kind is ColumnKind.NUMERIC:
                numeric[col.name] = np.asarray(values, dtype=np.float64).copy()
            else:
                cats: list[str] = []
                index: dict[str, int] = {}
                arr = np.empty(n, dtype=np.int64)
                for i, v in enumerate(values):
                    key = str(v)
                    code = index.get(key)
                    if code is None:
                        code = len(cats)
                        index[key] = code
                        cats.append(key)
                    arr[i] = code
                codes[col.name] = arr
                categories[col.name] = tuple(cats)
        return cls(schema, row_count or 0, numeric, codes, categories)

    def column(self, name: str) -> np.ndarray:
        """Raw column array: floats for numeric, integer codes for categorical."""
        if name in self._numeric:
            return self._numeric[name]
        if name in self._codes:
            return self._codes[name]
        raise SchemaError(f"no such column: {name!r}")

    def categories(self, name: str) -> tuple[str, ...]:
        if name not in self._categories:
            raise SchemaError(f"not a categorical column: {name!r}")
        return self._categories[name]

    def categorical_strings(self, name: str) -> np.ndarray:
        """Categorical column decoded back to its string labels."""
        cats = np.asarray(self.categories(name), dtype=object)
        return cats[self._codes[name]]

    def take(self, indices: np.ndarray) -> "DataTable":
        """Row subset/reorder by index array (categories dictionaries preserved)."""
        idx = np.asarray(indices, dtype=np.int64)
        numeric = {n: self._numeric[n][idx].copy() for n in self._numeric}
        codes = {n: self._codes[n][idx].copy() for n in self._codes}
        return DataTable(self.schema, len(idx), numeric, codes, dict(self._categories))

    def row_tuple(self, i: int) -> tuple:
        """One row as a tuple of floats / category strings, in schema order."""
        out = []
        for col in self.schema.columns:
            if col.kind is ColumnKind.NUMERIC:
                out.append(float(self._numeric[col.name][i]))
            else:
                out.append(self._categories[col.name][self._codes[col.name][i]])
        return tuple(out)


@dataclass(frozen=True)
class LoadResult:
    table: DataTable
    dropped: int


@dataclass(frozen=True)
class NormalizationParams:
    """Per-column normalization state fitted on the REAL table.

    Numeric columns carry exact (min, max) extrema; categorical columns carry
    the real table's category dictionary, used for one-hot distance encoding.
    """

    schema: TableSchema
    numeric_ranges: dict[str, tuple[float, float]]
    categories: dict[str, tuple[str, ...]]

    def range_of(self, name: str) -> tuple[float, float]:
        return self.numeric_ranges[name]


def _read_rows(path: str | Path, delimiter: str) -> tuple[list[str], Iterable[list[str]]]:
    try:
        handle = open(path, "r", newline="", encoding="utf-8")
    except OSError as exc:
        raise TableIOError(f"cannot read {path}: {exc}") from exc

    reader = csv.reader(handle, delimiter=delimiter)
    try:
        header = next(reader)
    except StopIteration:
        handle.close()
        raise SchemaError(f"{path}: empty file (no header row)")
    except csv.Error as exc:
        handle.close()
        raise TableIOError(f"{path}: malformed CSV: {exc}") from exc

    def rows():
        with handle:
            for row in reader:
                yield row

    return header, rows()


def infer_schema(path: str | Path, sample_rows: int = DEFAULT_SAMPLE_ROWS, delimiter: str = ",") -> TableSchema:
    """Infer column kinds from the first `sample_rows` data rows.

    A column is numeric iff every sampled non-missing cell parses as a finite
    real; otherwise categorical. Deterministic for fixed input bytes.
    """
    if sample_rows < 1:
        raise SchemaError("sample_rows must be positive")
    header, rows = _read_rows(path, delimiter)
    n_cols = len(header)
    all_numeric = [True] * n_cols
    for i, row in enumerate(rows):
        if i >= sample_rows:
            break
        for j in range(min(len(row), n_cols)):
            cell = row[j]
            if all_numeric[j] and cell.strip() and parse_numeric(cell) is None:
                all_numeric[j] = False
    columns = tuple(
        Column(name, ColumnKind.NUMERIC if all_numeric[j] else ColumnKind.CATEGORICAL)
        for j, name in enumerate(header)
    )
    return TableSchema(columns)


def read_schema_file(path: str | Path) -> dict[str, ColumnKind]:
    """Parse a schema override file: one `name: numeric|categorical` per line.

    Blank lines and `#` comments are ignored. Returns a partial mapping; the
    caller merges it over inferred kinds.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise TableIOError(f"cannot read schema file {path}: {exc}") from exc
    overrides: dict[str, ColumnKind] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, kind_text = line.rpartition(":")
        if not sep or not name.strip():
            raise SchemaError(f"{path}:{lineno}: expected 'name: numeric|categorical'")
        kind_text = kind_text.strip().lower()
        if kind_text not in ("numeric", "categorical"):
            raise SchemaError(f"{path}:{lineno}: unknown kind {kind_text!r}")
        name = name.strip()
        if name in overrides:
            raise SchemaError(f"{path}:{lineno}: duplicate override for {name!r}")
        overrides[name] = ColumnKind(kind_text)
    return overrides


def resolve_schema(
    path: str | Path,
    override_path: str | Path | None = None,
    sample_rows: int = DEFAULT_SAMPLE_ROWS,
    delimiter: str = ",",
) -> TableSchema:
    """Inferred schema with any override-file kinds applied on top."""
    schema = infer_schema(path, sample_rows=sample_rows, delimiter=delimiter)
    if override_path is None:
        return schema
    overrides = read_schema_file(override_path)
    names = set(schema.names)
    for name in overrides:
        if name not in names:
            raise SchemaError(f"override column {name!r} not present in {path} header")
    return TableSchema(tuple(Column(c.name, overrides.get(c.name, c.kind)) for c in schema.columns))


def load_table(
    path: str | Path,
    schema: TableSchema | None = None,
    delimiter: str = ",",
    sample_rows: int = DEFAULT_SAMPLE_ROWS,
) -> LoadResult:
    """Load a delimited text table, dropping rows with any missing/unparseable cell.

    Missing means an empty cell, a short row, or (for numeric columns) a cell
    that does not parse as a finite real. Returns the table plus the count of
    dropped rows.
    """
    if schema is None:
        schema = infer_schema(path, sample_rows=sample_rows, delimiter=delimiter)
    header, rows = _read_rows(path, delimiter)
    if tuple(header) != schema.names:
        raise SchemaError(f"{path}: header {tuple(header)!r} does not match schema columns {schema.names!r}")

    kinds = [c.kind for c in schema.columns]
    n_cols = len(kinds)
    numeric_data: list[list[float]] = [[] for _ in range(n_cols)]
    string_data: list[list[str]] = [[] for _ in range(n_cols)]
    dropped = 0
    for row in rows:
        if len(row) != n_cols:
            dropped += 1
            continue
        parsed: list = [None] * n_cols
        ok = True
        for j in range(n_cols):
            cell = row[j]
            if kinds[j] is ColumnKind.NUMERIC:
                value = parse_numeric(cell)
                if value is None:
                    ok = False
                    break
                parsed[j] = value
            else:
                if not cell.strip():
                    ok = False
                    break
                parsed[j] = cell
        if not ok:
            dropped += 1
            continue
        for j in range(n_cols):
            if kinds[j] is ColumnKind.NUMERIC:
                numeric_data[j].append(parsed[j])
            else:
                string_data[j].append(parsed[j])

    columns: dict[str, Sequence] = {}
    for j, col in enumerate(schema.columns):
        columns[col.name] = numeric_data[j] if col.kind is ColumnKind.NUMERIC else string_data[j]
    table = DataTable.from_columns(schema, columns)
    if table.row_count == 0:
        raise SchemaError(f"{path}: no rows survived cleaning ({dropped} dropped)")
    return LoadResult(table, dropped)


def write_table(table: DataTable, path: str | Path, delimiter: str = ",") -> None:
    """Write a table as UTF-8 CSV with a header row; floats use shortest round-trip repr."""
    try:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, delimiter=delimiter)
            writer.writerow(table.schema.names)
            cols = []
            for col in table.schema.columns:
                if col.kind is ColumnKind.NUMERIC:
                    cols.append([repr(float(v)) for v in table.column(col.name)])
                else:
                    cols.append(table.categorical_strings(col.name))
            for i in range(table.row_count):
                writer.writerow([c[i] for c in cols])
    except OSError as exc:
        raise TableIOError(f"cannot write {path}: {exc}") from exc


def fit_normalization(real: DataTable) -> NormalizationParams:
    """Exact per-column extrema and category dictionaries of the real table."""
    if real.row_count < 1:
        raise SchemaError("cannot fit normalization on an empty table")
    ranges = {}
    for name in real.schema.numeric_names:
        col = real.column(name)
        ranges[name] = (float(col.min()), float(col.max()))
    cats = {name: real.categories(name) for name in real.schema.categorical_names}
    return NormalizationParams(real.schema, ranges, cats)


_HALF_SQRT2 = 1.0 / np.sqrt(2.0)


def encode_for_distance(table: DataTable, params: NormalizationParams) -> np.ndarray:
    """Embed a table into the normalized numeric space used for privacy distances.

    Numeric cell x -> (x - min) / (max - min) clamped to [0, 1]; constant
    columns map to 0. Each categorical column becomes a one-hot block scaled
    by 1/sqrt(2) with a trailing "unknown" slot for categories outside the
    real dictionary, so mismatched categories contribute exactly 1 to squared
    distance and matches contribute 0.
    """
    if table.schema != params.schema:
        raise SchemaError("table schema does not match normalization params")
    blocks: list[np.ndarray] = []
    for col in table.schema.columns:
        if col.kind is ColumnKind.NUMERIC:
            lo, hi = params.range_of(col.name)
            values = table.column(col.name)
            if hi > lo:
                scaled = np.clip((values - lo) / (hi - lo), 0.0, 1.0)
            else:
                scaled = np.zeros(table.row_count)
            blocks.append(scaled.reshape(-1, 1))
        else:
            real_cats = params.categories[col.name]
            position = {c: k for k, c in enumerate(real_cats)}
            unknown = len(real_cats)
            table_cats = table.categories(col.name)
            remap = np.array([position.get(c, unknown) for c in table_cats], dtype=np.int64)
            cols = remap[table.column(col.name)]
            block = np.zeros((table.row_count, unknown + 1))
            block[np.arange(table.row_count), cols] = _HALF_SQRT2
            blocks.append(block)
    return np.hstack(blocks) if blocks else np.zeros((table.row_count, 0))
