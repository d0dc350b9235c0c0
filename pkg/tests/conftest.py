"""
Pytest configuration and shared fixtures for bruhat-cluster-lab tests.

Provides Cartan realizations, the affine A1 worked example and a clean
configuration singleton for every test.
"""

import json
from pathlib import Path

import pytest
import sympy as sp

from app.config import Config
from app.models.cartan import from_preset, type_a
from app.models.seed import parse_double_word
from app.utils.matrices import rational_matrix

FIXTURES = Path(__file__).parent / "fixtures"


def _pairs_matrix(rows):
    return rational_matrix([[sp.Rational(p, q) for p, q in row] for row in rows])


CONFIG_ENV_VARS = (
    "BCF_RNG_SEED",
    "BCF_TRIALS",
    "BCF_MAX_ENTRY",
    "BCF_RESAMPLE_LIMIT",
    "BCF_THREADS",
    "BCF_OUTPUT_FORMAT",
    "CONFIG_FILE",
    "LOG_FORMAT",
    "LOG_FILE",
)


@pytest.fixture(autouse=True)
def reset_config(monkeypatch):
    """Every test starts from environment defaults and a fresh Config."""
    for name in CONFIG_ENV_VARS:
        monkeypatch.delenv(name, raising=False)
    Config.reset()
    yield
    Config.reset()


@pytest.fixture
def a1_affine():
    return from_preset("A1affine")


@pytest.fixture
def a2():
    return from_preset("A2")


@pytest.fixture
def b2():
    return from_preset("B2")


@pytest.fixture
def g2():
    return from_preset("G2")


@pytest.fixture
def sl2():
    return type_a(2)


@pytest.fixture
def sl3():
    return type_a(3)


@pytest.fixture
def example_word(a1_affine):
    """The affine A1 double word (-1,-2,1,2)."""
    return parse_double_word(a1_affine, (-1, -2, 1, 2))


@pytest.fixture(scope="session")
def example_data():
    with open(FIXTURES / "a1_affine_example.json", "r", encoding="utf-8") as f:
        data = json.load(f)
    data["B"] = _pairs_matrix(data["B"])
    data["M"] = _pairs_matrix(data["M"])
    data["Btilde"] = sp.ImmutableMatrix(data["Btilde"])
    data["Cfull"] = sp.ImmutableMatrix(data["Cfull"])
    return data
