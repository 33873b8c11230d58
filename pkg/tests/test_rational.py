"""Exact-arithmetic identities at rational nu: zero means identically zero."""

from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from paracoh.params import Kind
from paracoh.rational import (
    dist_invariance_defect_exact,
    dist_value_exact,
    pairing_matrix_exact,
    phi_exact,
    u_action_exact,
)

POINTS = [
    (Kind.PRINCIPAL, Fraction(0), None),
    (Kind.COMPLEMENTARY, Fraction(1, 2), None),
    (Kind.DISCRETE, Fraction(3), 2),
]


def test_invariance_exact():
    for kind, nu, n in POINTS:
        lo = n if kind is Kind.DISCRETE else -12
        for k in range(lo, 13):
            for tag in ("+", "-"):
                assert dist_invariance_defect_exact(kind, nu, n, tag, k) == 0


@given(num=st.integers(min_value=-19, max_value=19), den=st.integers(min_value=20, max_value=40),
       k=st.integers(min_value=-10, max_value=10))
def test_invariance_exact_random_rational_nu(num, den, k):
    nu = Fraction(num, den)  # |nu| < 1
    kind = Kind.PRINCIPAL if nu == 0 else Kind.COMPLEMENTARY
    for tag in ("+", "-"):
        assert dist_invariance_defect_exact(kind, nu, None, tag, k) == 0


def test_pairing_exact():
    one, zero = Fraction(1), Fraction(0)
    assert pairing_matrix_exact(Kind.PRINCIPAL, Fraction(0)) == [[one, zero], [zero, one]]
    assert pairing_matrix_exact(Kind.COMPLEMENTARY, Fraction(1, 2)) == [[one, zero], [zero, one]]
    assert pairing_matrix_exact(Kind.DISCRETE, Fraction(3), 2) == [[one, zero], [zero, zero]]


def test_lowest_weight_annihilated_exact():
    act = u_action_exact(Kind.DISCRETE, Fraction(3), 2, 2)
    assert set(act) == {2, 3}  # no index below the lowest weight


def test_dist_values_exact_match_displays():
    assert dist_value_exact(Kind.COMPLEMENTARY, Fraction(1, 2), None, "-", 2) == Fraction(5, 21)
    assert dist_value_exact(Kind.PRINCIPAL, Fraction(0), None, "-", 2) == Fraction(4, 3)
    assert dist_value_exact(Kind.DISCRETE, Fraction(3), 2, "-", 5) == 0


def test_phi_exact_displays():
    v = phi_exact(Kind.COMPLEMENTARY, Fraction(1, 2), None, "+")
    assert v == {0: Fraction(-1, 2), 1: Fraction(3, 2)}
