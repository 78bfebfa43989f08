import os
from fractions import Fraction

import numpy as np
import pytest

from helpers import EXAMPLE_PAIRS, write_dataset
from src.config import load_settings
from src.model import make_beliefs, make_dataset


@pytest.fixture(autouse=True)
def _fresh_settings(monkeypatch):
    """Every test sees default settings, whatever the developer's .env holds."""
    for name in list(os.environ):
        if name.startswith("SEU_CORNER_") and name != "SEU_CORNER_SEED":
            monkeypatch.delenv(name, raising=False)
    load_settings.cache_clear()
    yield
    load_settings.cache_clear()


@pytest.fixture
def example_dataset():
    """Three corner observations: (100,0) at (1,4), (0,80) at (4,1), (0,60) at (3,1)."""
    return make_dataset(EXAMPLE_PAIRS)


@pytest.fixture
def example_beliefs():
    return make_beliefs("1/4,3/4")


@pytest.fixture
def garp_violation_dataset():
    return make_dataset(
        [
            ((1, 1), (3, 0)),
            ((1, 4), (0, 2)),
        ]
    )


@pytest.fixture
def sarseu_violation_dataset():
    return make_dataset(
        [
            ((3, 1), (2, 1)),
            ((1, 1), (1, 2)),
        ]
    )


@pytest.fixture
def long_cycle_dataset():
    """Every two-pair sequence has product 121/200 but the three-state cycle has (11/10)^3."""
    a, b = Fraction(11, 10), Fraction(2)
    return make_dataset(
        [
            ((a, 1, b), (2, 1, 1)),
            ((b, a, 1), (1, 2, 1)),
            ((1, b, a), (1, 1, 2)),
        ]
    )


@pytest.fixture
def conflicting_dataset():
    return make_dataset(
        [
            ((4, 1), (10, 0)),
            ((1, 4), (0, 10)),
        ]
    )


@pytest.fixture
def rng():
    return np.random.default_rng(int(os.environ.get("SEU_CORNER_SEED", 20240101)))


@pytest.fixture
def example_json(tmp_path):
    return write_dataset(tmp_path / "example.json", EXAMPLE_PAIRS, states=["s1", "s2"])


@pytest.fixture
def conflicting_json(tmp_path):
    return write_dataset(tmp_path / "conflicting.json", [((4, 1), (10, 0)), ((1, 4), (0, 10))])
