import pytest
from hypothesis import given
from hypothesis import strategies as st

from paracoh import (
    AssumptionGateError,
    IndexWindow,
    InvalidIndex,
    MultiParam,
    SeriesParam,
    SpectralGapError,
    default_window,
)
from paracoh.params import expand_window


def test_series_validation():
    with pytest.raises(ValueError):
        SeriesParam.complementary(0.0)
    with pytest.raises(ValueError):
        SeriesParam.complementary(1.0)  # the trivial-representation boundary
    with pytest.raises(ValueError):
        SeriesParam.complementary(-1.3)
    with pytest.raises(ValueError):
        SeriesParam.discrete(0)
    with pytest.raises(ValueError):
        SeriesParam(kind=SeriesParam.principal(1.0).kind, nu=1.0 + 0j)  # real principal
    # nu = 0 principal is admitted
    assert SeriesParam.principal(0.0).mu == 0.25


@given(st.integers(min_value=1, max_value=40))
def test_discrete_nu_relation(n):
    p = SeriesParam.discrete(n)
    assert p.nu == 2 * n - 1
    assert p.mu == pytest.approx((1 - (2 * n - 1) ** 2) / 4)
    assert p.lowest == n


def test_windows():
    w = IndexWindow(-3, 5)
    assert len(w) == 9 and 0 in w and -4 not in w
    with pytest.raises(ValueError):
        IndexWindow(2, 1)
    p = SeriesParam.discrete(2)
    assert default_window(p, 10) == IndexWindow(2, 12)
    assert expand_window(p, IndexWindow(2, 12), 1) == IndexWindow(2, 13)
    q = SeriesParam.principal(1.0)
    assert default_window(q, 4) == IndexWindow(-4, 4)
    assert expand_window(q, IndexWindow(-4, 4), 2) == IndexWindow(-6, 6)


def test_gates_distinct_errors():
    ok = (SeriesParam.principal(1.0), SeriesParam.complementary(0.5))
    MultiParam(ok, eps0=0.05, nu0=0.95)
    with pytest.raises(AssumptionGateError):
        MultiParam((SeriesParam.principal(1.0), SeriesParam.complementary(0.03)), eps0=0.05)
    with pytest.raises(AssumptionGateError):
        MultiParam((SeriesParam.principal(0.01),), eps0=0.05)  # punctured ball in C
    with pytest.raises(SpectralGapError):
        MultiParam((SeriesParam.complementary(0.97),), nu0=0.95)
    # nu = 0 passes the punctured-ball gate
    MultiParam((SeriesParam.principal(0.0),), eps0=0.05)


def test_multi_param_drop():
    mp = MultiParam((SeriesParam.principal(1.0), SeriesParam.discrete(1)))
    assert mp.drop(0).factors == (SeriesParam.discrete(1),)
    assert mp.d == 2 and mp.drop(1).d == 1
    with pytest.raises(InvalidIndex):
        mp.drop(2)
