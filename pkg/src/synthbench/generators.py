"""Built-in statistical generators: bootstrap, independent marginals, Gaussian copula.

They exercise the full pipeline without deep learning and double as metric
oracles (bootstrap output replicates real rows exactly; marginal sampling
preserves marginals while destroying cross-column correlation; the copula
preserves both).

Randomness: numpy PCG64 generators seeded through SeedSequence. Column-level
sampling uses spawned child streams in a fixed layout — marginal: child i
drives schema column i; copula: child 0 drives the latent normal draw and
child 1 + j drives the j-th categorical column — so column-parallel
execution cannot change outputs.
"""

from __future__ import annotations

import shlex
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import GeneratorError, SchemaError
from .tabular import ColumnKind, DataTable, TableSchema

__all__ = [
    "GeneratorSpec",
    "CopulaModel",
    "BUILTIN_KINDS",
    "generate_bootstrap",
    "generate_marginal",
    "fit_copula",
    "sample_copula",
    "generate_builtin",
]

BUILTIN_KINDS = ("bootstrap", "marginal", "copula")

_JITTERS = (1e-6, 1e-5, 1e-4, 1e-3, 1e-2)


@dataclass(frozen=True)
class GeneratorSpec:
    """One generator to benchmark: a builtin kind or an external plugin command."""

    kind: str
    name: str = ""
    command: str | None = None
    hyperparams: Mapping[str, str] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in BUILTIN_KINDS + ("plugin",):
            raise SchemaError(f"unknown generator kind {self.kind!r}")
        if self.kind == "plugin":
            if not self.command or not shlex.split(self.command):
                raise SchemaError("plugin generator requires a non-empty command")
        elif self.hyperparams:
            raise SchemaError(f"builtin generator {self.kind!r} takes no hyperparameters")
        if not self.name:
            object.__setattr__(self, "name", self.kind)

    @classmethod
    def parse(cls, text: str, seed: int = 0, hyperparams: Mapping[str, str] | None = None) -> "GeneratorSpec":
        """Parse a CLI-style selector: bootstrap|marginal|copula|plugin:<command>."""
        if text.startswith("plugin:"):
            command = text[len("plugin:"):]
            return cls("plugin", command=command, hyperparams=hyperparams or {}, seed=seed)
        return cls(text, hyperparams=hyperparams or {}, seed=seed)


def _require_rows(real: DataTable) -> None:
    if real.row_count == 0:
        raise GeneratorError("cannot generate from an empty real table")


def generate_bootstrap(real: DataTable, n: int, seed: int) -> DataTable:
    """n rows drawn uniformly with replacement from the real table."""
    _require_rows(real)
    if n < 1:
        raise GeneratorError("n must be >= 1")
    rng = np.random.default_rng(seed)
    return real.take(rng.integers(0, real.row_count, size=n))


def generate_marginal(real: DataTable, n: int, seed: int) -> DataTable:
    """Each column resampled independently from its empirical distribution."""
    _require_rows(real)
    if n < 1:
        raise GeneratorError("n must be >= 1")
    children = np.random.SeedSequence(seed).spawn(len(real.schema.columns))
    columns = {}
    for col, child in zip(real.schema.columns, children):
        rng = np.random.default_rng(child)
        idx = rng.integers(0, real.row_count, size=n)
        if col.kind is ColumnKind.NUMERIC:
            columns[col.name] = real.column(col.name)[idx]
        else:
            columns[col.name] = real.categorical_strings(col.name)[idx]
    return DataTable.from_columns(real.schema, columns)


@dataclass(frozen=True)
class CopulaModel:
    """Fitted Gaussian copula: latent correlation + per-column empirical state."""

    schema: TableSchema
    sorted_values: dict[str, np.ndarray]
    correlation: np.ndarray
    categorical_strings: dict[str, np.ndarray]
    row_count: int


def fit_copula(real: DataTable) -> CopulaModel:
    """Rank-transform numeric columns to normal scores and estimate their correlation.

    Categorical columns keep their raw value sequences for independent
    empirical resampling (an all-categorical table degenerates to marginal
    sampling — no copula applies).
    """
    if real.row_count < 2:
        raise GeneratorError("copula requires at least two real rows")
    numeric = real.schema.numeric_names
    n = real.row_count
    sorted_values = {}
    z_cols = []
    constant = []
    for name in numeric:
        col = real.column(name)
        sorted_values[name] = np.sort(col)
        order = np.argsort(col, kind="stable")
        ranks = np.empty(n)
        ranks[order] = np.arange(1, n + 1)
        # average ranks over ties so equal values share one normal score
        uniq, inverse, counts = np.unique(col, return_inverse=True, return_counts=True)
        if len(uniq) < n:
            sums = np.zeros(len(uniq))
            np.add.at(sums, inverse, ranks)
            ranks = (sums / counts)[inverse]
        constant.append(len(uniq) == 1)
        z_cols.append(ndtri(ranks / (n + 1)))
    if numeric:
        z = np.column_stack(z_cols)
        with np.errstate(invalid="ignore", divide="ignore"):
            corr = np.corrcoef(z, rowvar=False).reshape(len(numeric), len(numeric))
        for j, is_const in enumerate(constant):
            if is_const:
                corr[j, :] = 0.0
                corr[:, j] = 0.0
        corr[np.arange(len(numeric)), np.arange(len(numeric))] = 1.0
        corr = np.nan_to_num(corr, nan=0.0)
        np.fill_diagonal(corr, 1.0)
    else:
        corr = np.zeros((0, 0))
    cats = {name: real.categorical_strings(name) for name in real.schema.categorical_names}
    return CopulaModel(real.schema, sorted_values, corr, cats, n)


def _cholesky_with_jitter(corr: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(corr)
    except np.linalg.LinAlgError:
        pass
    for jitter in _JITTERS:
        try:
            return np.linalg.cholesky(corr + jitter * np.eye(corr.shape[0]))
        except np.linalg.LinAlgError:
            continue
    raise GeneratorError(f"correlation matrix not factorizable even with jitter up to {_JITTERS[-1]}")


def sample_copula(model: CopulaModel, n: int, seed: int) -> DataTable:
    """Draw n rows: latent multivariate normal inverted through empirical quantiles."""
    if n < 1:
        raise GeneratorError("n must be >= 1")
    numeric = model.schema.numeric_names
    children = np.random.SeedSequence(seed).spawn(1 + len(model.schema.categorical_names))
    columns = {}
    if numeric:
        L = _cholesky_with_jitter(model.correlation)
        rng = np.random.default_rng(children[0])
        z = rng.standard_normal((n, len(numeric))) @ L.T
        u = ndtr(z)
        for j, name in enumerate(numeric):
            vals = model.sorted_values[name]
            # linear interpolation between order statistics
            columns[name] = np.interp(u[:, j] * (len(vals) - 1), np.arange(len(vals)), vals)
    for k, name in enumerate(model.schema.categorical_names):
        rng = np.random.default_rng(children[1 + k])
        idx = rng.integers(0, model.row_count, size=n)
        columns[name] = model.categorical_strings[name][idx]
    return DataTable.from_columns(model.schema, columns)


def generate_builtin(kind: str, real: DataTable, n: int, seed: int) -> DataTable:
    """Dispatch a builtin generator by kind (fit + sample for the copula)."""
    if kind == "bootstrap":
        return generate_bootstrap(real, n, seed)
    if kind == "marginal":
        return generate_marginal(real, n, seed)
    if kind == "copula":
        return sample_copula(fit_copula(real), n, seed)
    raise GeneratorError(f"unknown builtin generator {kind!r}")
