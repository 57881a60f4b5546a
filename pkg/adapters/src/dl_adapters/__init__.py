"""Plugin-protocol adapters for deep generative tabular models.

Standalone executables (ctgan, tvae, wgan, findiff) that train on a CSV and
write synthetic rows, for benchmarking through the harness's plugin wire
contract. No shared state with the harness beyond files.
"""

__version__ = "0.1.0"
