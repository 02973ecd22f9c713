import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lambertcert import DomainError, ExactReal, asymptote_gap, conjecture_margin, solve, y_of_x
from lambertcert.reals import E, to_fraction


def y_bisect(x, prec=200):
    """Independent reference: bisection on y ln x - x ln y over the branch not containing x."""
    with mpmath.workprec(prec + 20):
        X = mpmath.mpf(x)
        g = lambda y: y * mpmath.ln(X) - X * mpmath.ln(y)  # noqa: E731
        lo, hi = (mpmath.mpf(1) + mpmath.mpf(2) ** -60, +mpmath.e) if X > mpmath.e else (+mpmath.e, mpmath.mpf(10) ** 6)
        g_lo = g(lo)
        for _ in range(prec):
            mid = (lo + hi) / 2
            if (g(mid) > 0) == (g_lo > 0):
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2


def contains(enc, q):
    return to_fraction(enc.lo) <= q <= to_fraction(enc.hi)


@pytest.mark.parametrize("x, y", [(2, 4), (4, 2)])
def test_integer_solutions(x, y):
    for digits in (10, 50):
        enc = y_of_x(x, digits)
        assert enc.certified and contains(enc, y)
        assert to_fraction(enc.hi) - to_fraction(enc.lo) <= Fraction(1, 10**digits)


def test_y_of_3():
    enc = y_of_x(3, 30)
    assert abs(enc.lo - y_bisect(3)) < 1e-29
    assert round(float(enc.lo), 6) == 2.478053


def test_y_at_e_is_e():
    enc = y_of_x(E, 20)
    with mpmath.workprec(200):
        assert enc.lo <= mpmath.e <= enc.hi


def test_y_near_e_uses_slope_and_is_uncertified():
    x = ExactReal(lambda iv: iv.e + iv.mpf(10) ** -40, "e+1e-40")
    enc = y_of_x(x, 20)
    assert enc.method == "slope-at-e" and not enc.certified
    with mpmath.workprec(200):
        assert enc.lo < mpmath.e < enc.hi


@pytest.mark.parametrize("x", [1, "0.5", 0, -3])
def test_domain(x):
    with pytest.raises(DomainError):
        y_of_x(x, 10)


def test_margin_examples():
    assert abs(conjecture_margin(4, 20) - (2 - (1 + (math.e - 1) ** 2 / 3))) < 1e-15
    assert round(float(conjecture_margin(4, 20)), 6) == 0.015836
    assert abs(conjecture_margin(2, 20) - (3 - (math.e - 1) ** 2)) < 1e-15
    assert conjecture_margin(50, 20) > 0


def test_margin_undefined_at_e():
    with pytest.raises(DomainError):
        conjecture_margin(E, 10)


def test_gap_examples():
    # (e^e - e) / ln(e)^2
    assert abs(asymptote_gap(E, 20) - (mpmath.e**mpmath.e - mpmath.e)) < 1e-12
    assert round(float(asymptote_gap(E, 20)), 5) == 12.43598
    assert abs(asymptote_gap(10**4, 20) - 1) < 0.25
    assert abs(asymptote_gap(10**8, 20) - 1) < 0.05


def test_gap_domain():
    with pytest.raises(DomainError):
        asymptote_gap(2, 10)


def test_solve_bundles_results():
    r = solve(3, 20)
    assert contains(r.y, to_fraction(y_of_x(3, 20).lo)) and r.margin > 0 and r.gap is not None
    assert solve(2, 20).gap is None


X_SAMPLES = st.one_of(st.floats(min_value=1.001, max_value=2.71), st.floats(min_value=2.73, max_value=1000))


@given(X_SAMPLES)
def test_symmetry(x):
    x = Fraction(x)
    y = y_of_x(x, 30)
    # y is decreasing, so y([lo, hi]) lies in [y(hi).lo, y(lo).hi]
    back_hi = y_of_x(y.lo, 30)
    back_lo = y_of_x(y.hi, 30)
    assert to_fraction(back_lo.lo) <= x <= to_fraction(back_hi.hi)


@given(st.floats(min_value=2.73, max_value=1e4), st.floats(min_value=1.001, max_value=2.0))
def test_monotone_decrease(x, factor):
    a, b = y_of_x(Fraction(x), 30), y_of_x(Fraction(x) * Fraction(factor), 30)
    assert b.hi < a.lo


@given(st.floats(min_value=2.7183, max_value=1e12))
def test_lower_bound_consistency(x):
    with mpmath.workprec(200):
        X = mpmath.mpf(x)
        assert -1 < -mpmath.ln(X) / X * (1 + (mpmath.e - 1) ** 2 / (X - 1))


@given(X_SAMPLES)
def test_defining_equation_residual(x):
    digits = 25
    y = y_of_x(Fraction(x), digits)
    with mpmath.workprec(300):
        X, Y = mpmath.mpf(x), (y.lo + y.hi) / 2
        assert abs(X**Y - Y**X) / X**Y < mpmath.mpf(10) ** (1 - digits) * max(1, X, Y)


@given(st.one_of(st.floats(min_value=1.0001, max_value=2.718), st.floats(min_value=2.7183, max_value=50)))
def test_margin_positive(x):
    assert conjecture_margin(Fraction(x), 20) > 0
