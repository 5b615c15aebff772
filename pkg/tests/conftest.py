from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from data import instances

# exact LPs are slow enough to trip the default per-example deadline
settings.register_profile(
    "exact", deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("exact")

PROBLEMS = Path(__file__).resolve().parent.parent / "data" / "problems"


@pytest.fixture
def problems_dir() -> Path:
    return PROBLEMS


@pytest.fixture
def c1_space():
    return instances.c1_space()


@pytest.fixture
def c1_gamma():
    return instances.c1_gamma_bar()


@pytest.fixture
def c1_spec():
    return instances.c1_spec()


@pytest.fixture
def c2_spec():
    return instances.c2_spec()
