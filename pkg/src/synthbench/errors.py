"""Exception hierarchy shared across the harness.

The CLI maps these onto its exit-code contract: TableIOError -> 1,
SchemaError -> 2, GeneratorError -> 3.
"""


class SynthBenchError(Exception):
    """Base class for all harness errors."""


class TableIOError(SynthBenchError):
    """A file could not be read or written."""


class SchemaError(SynthBenchError):
    """Schema or data validation failed (mismatched headers, empty tables, bad kinds)."""


class GeneratorError(SynthBenchError):
    """A generator (builtin or plugin subprocess) failed to produce usable output."""
