"""
Shared fixtures for the bce-lab test suite.
"""

from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from src.bcelab.core.config import config
from src.bcelab.scenarios import catalog

SAMPLES = Path(__file__).resolve().parent.parent / "samples"

settings.register_profile(
    "exact",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("exact")


@pytest.fixture(autouse=True)
def fresh_config():
    """Command-line overrides must not leak between tests."""
    yield
    config.reload()


@pytest.fixture
def samples() -> Path:
    return SAMPLES


@pytest.fixture
def example1():
    return catalog.example1()


@pytest.fixture
def example1_mixture():
    return catalog.example1_mixture()


@pytest.fixture
def half() -> Fraction:
    return Fraction(1, 2)
