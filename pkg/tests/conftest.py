import numpy as np
import pytest

from helpers import make_schema, make_table, random_mixed_table


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def numeric_table():
    schema = make_schema(("x", "numeric"), ("y", "numeric"))
    rng = np.random.default_rng(11)
    x = rng.normal(size=1000)
    y = 0.5 * x + rng.normal(scale=0.5, size=1000)
    return make_table(schema, x=x, y=y)


@pytest.fixture
def categorical_table():
    schema = make_schema(("a", "categorical"), ("b", "categorical"))
    rng = np.random.default_rng(12)
    a = [f"u{int(v)}" for v in rng.integers(0, 8, size=1000)]
    b = [f"v{int(v)}" for v in rng.integers(0, 3, size=1000)]
    return make_table(schema, a=a, b=b)


@pytest.fixture
def mixed_table():
    rng = np.random.default_rng(13)
    return random_mixed_table(rng, 1000, 3, 2)
