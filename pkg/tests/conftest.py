import numpy as np
import pytest

from paracoh import SeriesParam


def grid_params():
    """The full nu grid used across suites (incl. negative complementary)."""
    return [
        SeriesParam.principal(0.0),
        SeriesParam.principal(1.0),
        SeriesParam.principal(10.0),
        SeriesParam.complementary(0.1),
        SeriesParam.complementary(0.5),
        SeriesParam.complementary(0.9),
        SeriesParam.complementary(-0.1),
        SeriesParam.complementary(-0.5),
        SeriesParam.complementary(-0.9),
        SeriesParam.discrete(1),
        SeriesParam.discrete(2),
        SeriesParam.discrete(5),
    ]


@pytest.fixture(scope="session")
def grid():
    return grid_params()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
