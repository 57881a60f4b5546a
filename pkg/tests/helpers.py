"""Shared table builders for the test suite."""

import numpy as np

from synthbench.tabular import Column, ColumnKind, DataTable, TableSchema


def make_schema(*cols: tuple[str, str]) -> TableSchema:
    return TableSchema(tuple(Column(name, ColumnKind(kind)) for name, kind in cols))


def make_table(schema: TableSchema, **columns) -> DataTable:
    return DataTable.from_columns(schema, columns)


def random_mixed_table(rng: np.random.Generator, rows: int, n_numeric: int, n_categorical: int) -> DataTable:
    cols = []
    data = {}
    for i in range(n_numeric):
        name = f"n{i}"
        cols.append((name, "numeric"))
        data[name] = rng.normal(scale=rng.uniform(0.5, 20.0), size=rows) + rng.uniform(-5, 5)
    for i in range(n_categorical):
        name = f"c{i}"
        cols.append((name, "categorical"))
        n_cats = int(rng.integers(1, 6))
        data[name] = [f"cat{int(k)}" for k in rng.integers(0, n_cats, size=rows)]
    return make_table(make_schema(*cols), **data)
