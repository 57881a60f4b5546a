"""synthbench: scores synthetic tabular datasets against their real counterparts.

Five metric families — fidelity (KS / correlation), synthesis novelty,
privacy (DCR / NNDR percentiles), computational efficiency, and transaction-
graph structure — plus built-in baseline generators and a timed, seeded
benchmark protocol with a subprocess plugin contract for external models.
"""

from .bench import BenchConfig, MetricReport, emit_report, run_benchmark, subset, timed_generate
from .errors import GeneratorError, SchemaError, SynthBenchError, TableIOError
from .fidelity import FidelityScores, column_fidelity, fidelity_scores, ks_statistic, row_fidelity
from .generators import (
    CopulaModel,
    GeneratorSpec,
    fit_copula,
    generate_bootstrap,
    generate_marginal,
    sample_copula,
)
from .graph import (
    GraphComparison,
    TransactionGraph,
    build_graph,
    graph_compare,
    netsimile_distance,
    node_features,
    signature,
)
from .privacy import PrivacyConfig, PrivacyScores, dcr, nndr, privacy_scores
from .synthesis import SynthesisConfig, synthesis_score
from .tabular import (
    Column,
    ColumnKind,
    DataTable,
    LoadResult,
    NormalizationParams,
    TableSchema,
    encode_for_distance,
    fit_normalization,
    infer_schema,
    load_table,
    resolve_schema,
    write_table,
)

__version__ = "0.1.0"
