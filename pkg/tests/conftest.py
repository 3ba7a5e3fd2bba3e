import random
from pathlib import Path

import pytest

from gcdeform import config
from gcdeform.artin import make_artin, truncate
from gcdeform.cartan import Chart
from gcdeform_tools import fixtures

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def rng():
    return random.Random(config.seed())


@pytest.fixture
def fixture_path():
    return lambda name: str(FIXTURES / name)


@pytest.fixture
def r4():
    return Chart(("x1", "x2", "x3", "x4"))


@pytest.fixture
def r2():
    return Chart(("x", "y"))


@pytest.fixture
def eps2():
    return truncate(2)


@pytest.fixture
def eps3():
    return truncate(3)


@pytest.fixture
def eps_delta():
    return make_artin(("eps", "delta"), ((2, 0), (0, 2), (1, 1)))


@pytest.fixture
def two_chart():
    return fixtures.two_chart_cover()


@pytest.fixture
def triangle():
    return fixtures.triangle_cover()


@pytest.fixture
def lagrangian():
    return fixtures.lagrangian_line()


@pytest.fixture
def complex_pair():
    return fixtures.complex_brane()


@pytest.fixture
def curved_complex_pair():
    return fixtures.complex_brane(curved=True)
