"""Single-irreducible layer: frozen examples plus the structural oracles.

Skew-adjointness of the generator against the basis norms is the oracle
validating both derived ingredients at once; the invariant-functional
checks live in test_distributions.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import paracoh as pc
from paracoh import (
    CoeffVector,
    IndexWindow,
    InvalidIndex,
    ParamMismatch,
    SeriesParam,
    apply_U,
    basis_norm_sq,
    basis_vector,
    casimir_mu,
    default_window,
    inner_product,
    sobolev_norm,
    weight_Q,
)
from paracoh.repn import basis_norm_sq_array, u_matrix, zero_vector


def test_casimir_examples():
    assert casimir_mu(SeriesParam.principal(1.0)) == pytest.approx(0.5)
    assert casimir_mu(SeriesParam.discrete(1)) == pytest.approx(0.0)
    assert casimir_mu(SeriesParam.complementary(0.5)) == pytest.approx(3 / 16)


def test_weight_examples():
    assert weight_Q(SeriesParam.principal(1.0), 0) == pytest.approx(0.5)
    assert weight_Q(SeriesParam.discrete(1), 1) == pytest.approx(2.0)
    assert weight_Q(SeriesParam.complementary(0.5), 3) == pytest.approx(3 / 16 + 18)
    with pytest.raises(InvalidIndex):
        weight_Q(SeriesParam.discrete(2), 1)


def test_basis_norm_examples():
    assert basis_norm_sq(SeriesParam.principal(3.0), 17) == 1.0
    # unitarity-oracle value: ratio -conj(c-(1))/c+(0) = (1-nu)/(1+nu) at nu=1/2
    assert basis_norm_sq(SeriesParam.complementary(0.5), 1) == pytest.approx(1 / 3)
    assert basis_norm_sq(SeriesParam.complementary(0.5), -1) == pytest.approx(1 / 3)
    assert basis_norm_sq(SeriesParam.discrete(1), 2) == pytest.approx(0.5)
    with pytest.raises(InvalidIndex):
        basis_norm_sq(SeriesParam.discrete(3), 2)


def test_basis_norm_array_matches_scalar(grid):
    for p in grid:
        win = default_window(p, 12)
        arr = basis_norm_sq_array(p, win)
        for k in win.indices():
            assert arr[k - win.lo] == pytest.approx(basis_norm_sq(p, int(k)), rel=1e-13)


def test_apply_u_discrete_example():
    p = SeriesParam.discrete(1)
    g = apply_U(basis_vector(p, 1))
    assert g.at(1) == pytest.approx(1j)
    assert g.at(2) == pytest.approx(-1j)
    assert g.window.lo == 1  # lowest weight never undershot


def test_apply_u_nu_zero_example():
    p = SeriesParam.principal(0.0)
    g = apply_U(basis_vector(p, 0))
    assert g.at(-1) == pytest.approx(0.25j)
    assert g.at(1) == pytest.approx(-0.25j)
    assert g.at(0) == 0


def test_apply_u_linearity_zero(grid):
    for p in grid:
        win = default_window(p, 6)
        g = apply_U(zero_vector(p, win))
        assert sobolev_norm(g, 0.0) == 0.0


def test_discrete_lowest_weight_never_undershot(rng):
    p = SeriesParam.discrete(3)
    win = default_window(p, 16)
    f = CoeffVector(p, win, (rng.standard_normal(len(win)) + 0j))
    g = apply_U(f)
    assert g.window.lo == 3


def test_discrete_window_above_lowest_weight(rng):
    # windows need not start at the lowest weight; expansion stays valid
    p = SeriesParam.discrete(2)
    win = IndexWindow(7, 20)
    f = CoeffVector(p, win, rng.standard_normal(len(win)) + 0j)
    g = apply_U(f)
    assert g.window == IndexWindow(6, 21)
    a, wout = u_matrix(p, win)
    assert wout == IndexWindow(6, 21)
    assert a.shape == (16, 14)


def test_sobolev_norm_examples():
    p = SeriesParam.principal(1.0)
    f = basis_vector(p, 0)
    # weight (1+mu+2k^2)^t: single term (3/2)^2, then the square root
    assert sobolev_norm(f, 2.0) == pytest.approx(1.5)
    assert sobolev_norm(f, 1.0) == pytest.approx(np.sqrt(1.5))
    assert sobolev_norm(zero_vector(p, IndexWindow(-2, 2)), 3.0) == 0.0
    q = SeriesParam.complementary(0.5)
    assert sobolev_norm(basis_vector(q, 1), 0.0) == pytest.approx(np.sqrt(1 / 3))


def test_sobolev_negative_order():
    p = SeriesParam.principal(1.0)
    f = basis_vector(p, 5)
    assert sobolev_norm(f, -2.0) == pytest.approx((1 + 0.5 + 50) ** -1.0)


def test_inner_product():
    p = SeriesParam.principal(2.0)
    w = IndexWindow(-2, 2)
    assert inner_product(basis_vector(p, 0, w), basis_vector(p, 0, w)) == pytest.approx(1.0)
    assert inner_product(basis_vector(p, 0, w), basis_vector(p, 1, w)) == 0.0
    q = SeriesParam.complementary(0.5)
    v = basis_vector(q, 1)
    assert inner_product(v, v) == pytest.approx(1 / 3)
    with pytest.raises(ParamMismatch):
        inner_product(basis_vector(p, 0), basis_vector(q, 0))


def _skew_defect(p: SeriesParam, k: int) -> float:
    win = default_window(p, k)
    a, wout = u_matrix(p, win)
    w2o = basis_norm_sq_array(p, wout)
    b = a * w2o[:, None]
    sel = slice(win.lo - wout.lo, win.hi - wout.lo + 1)
    m = b[sel, :].T
    d = m + m.conj().T
    scale = np.maximum(np.abs(m), np.abs(m.conj().T))
    return float(np.max(np.abs(d) / np.maximum(scale, 1.0)))


def test_skew_adjointness_grid(grid):
    for p in grid:
        assert _skew_defect(p, 64) <= 1e-12, p.label()


@settings(max_examples=60, deadline=None)
@given(
    kind=st.sampled_from(["principal", "complementary", "discrete"]),
    val=st.floats(min_value=0.02, max_value=0.98),
    n=st.integers(min_value=1, max_value=9),
    k=st.integers(min_value=8, max_value=40),
)
def test_skew_adjointness_random_params(kind, val, n, k):
    if kind == "principal":
        p = SeriesParam.principal(val * 20)
    elif kind == "complementary":
        p = SeriesParam.complementary(val)
    else:
        p = SeriesParam.discrete(n)
    assert _skew_defect(p, k) <= 1e-12


def test_derivative_norm_constant(grid, rng):
    # ||U f||_t <= C ||f||_{t+1} with one constant C <= 4 across the grid
    from paracoh.generate import random_vector

    worst = 0.0
    for p in grid:
        win = default_window(p, 48)
        for t in (0.0, 1.0, 2.0):
            for _ in range(5):
                f = random_vector(p, win, rng, decay=2.0)
                worst = max(
                    worst, sobolev_norm(apply_U(f), t) / sobolev_norm(f, t + 1.0)
                )
    assert worst <= 4.0


def test_embedded_guards_support():
    p = SeriesParam.principal(1.0)
    v = basis_vector(p, 3, IndexWindow(0, 4))
    with pytest.raises(ValueError):
        v.embedded(IndexWindow(0, 2))
    w = v.embedded(IndexWindow(-1, 6))
    assert w.at(3) == 1.0
