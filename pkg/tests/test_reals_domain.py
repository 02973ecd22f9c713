from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lambertcert import Argument, Branch, DomainError, Region, classify, locate
from lambertcert.domain import INV_E, QUARTER, branch_gap_bits, exact_value
from lambertcert.reals import (
    E,
    NEG_INV_E,
    ExactReal,
    Pair,
    compare,
    fixed,
    lambert_point,
    parse_decimal,
    real,
    sci,
    to_fraction,
)


# --- exact reals -------------------------------------------------------------


def test_real_accepts_decimal_fraction_and_names():
    assert real("0.1").rational == Fraction(1, 10)
    assert real("3/7").rational == Fraction(3, 7)
    assert real(0.5).rational == Fraction(1, 2)
    assert real("e") is E
    assert real("-1/e") is NEG_INV_E
    assert real(mpmath.e) is E


@pytest.mark.parametrize("bad", ["abc", "1/0", "", "nan"])
def test_real_rejects_garbage(bad):
    with pytest.raises(ValueError):
        real(bad)


def test_real_rejects_bool_and_nonfinite():
    with pytest.raises(TypeError):
        real(True)
    with pytest.raises(ValueError):
        real(float("inf"))


def test_exact_real_enclosure_contains_value():
    lo, hi = E.interval(200)
    mpmath.mp.prec = 300
    e = mpmath.e + 0
    assert mpmath.mp.make_mpf(lo) <= e <= mpmath.mp.make_mpf(hi)
    mpmath.mp.prec = 53


def test_lambert_point_known_values():
    p = lambert_point(-2)
    assert p.lambert_value(-1) == -2 and p.lambert_value(0) is None
    assert lambert_point(1) is not None and E.lambert_value(0) == 1
    assert NEG_INV_E.lambert_value(0) == NEG_INV_E.lambert_value(-1) == -1


def test_compare_is_exact_for_close_values():
    a = real("0.1")
    b = real("0.1000000000000000000000000000000000000000000000000001")
    assert compare(a, b) == -1 and compare(b, a) == 1 and compare(a, a) == 0
    assert compare(E, "2.718281828459045") == 1
    assert compare(INV_E, "0.36787944117144233") == -1


@given(st.fractions(min_value=-1000, max_value=1000), st.fractions(min_value=-1000, max_value=1000))
def test_compare_matches_fraction_order(p, q):
    assert compare(p, q) == (p > q) - (p < q)


def test_pair_mid_width_contains():
    p = Pair(mpmath.mpf(1), mpmath.mpf(2))
    assert p.mid == mpmath.mpf(1.5) and p.width == 1
    assert 1.5 in p and 2.5 not in p


@pytest.mark.parametrize(
    "value, places, rounding, expected",
    [
        (Fraction(2, 3), 3, "nearest", "0.667"),
        (Fraction(2, 3), 3, "floor", "0.666"),
        (Fraction(-2, 3), 3, "floor", "-0.667"),
        (Fraction(-2, 3), 3, "ceiling", "-0.666"),
        (Fraction(5), 2, "nearest", "5.00"),
    ],
)
def test_fixed_directed_rounding(value, places, rounding, expected):
    assert fixed(value, places, rounding) == expected


def test_sci_directed_rounding_brackets_value():
    v = mpmath.mpf(2) / 3
    lo, hi = sci(v, 5, "floor"), sci(v, 5, "ceiling")
    assert Fraction(lo) <= to_fraction(v) <= Fraction(hi)
    assert lo == "6.6666e-1" and hi == "6.6667e-1"


@given(st.fractions(min_value=Fraction(-10**6), max_value=Fraction(10**6)), st.integers(1, 40))
def test_sci_outward_rounding_property(q, sig):
    lo, hi = Fraction(sci(q, sig, "floor")), Fraction(sci(q, sig, "ceiling"))
    assert lo <= q <= hi


def test_parse_decimal_directed():
    lo = parse_decimal("0.1", 64, "floor")
    hi = parse_decimal("0.1", 64, "ceiling")
    assert to_fraction(lo) < Fraction(1, 10) < to_fraction(hi)


# --- branches, arguments, regions -------------------------------------------


@pytest.mark.parametrize("text, branch", [("0", Branch.PRINCIPAL), ("-1", Branch.LOWER), ("w-1", Branch.LOWER), (0, Branch.PRINCIPAL), (-1, Branch.LOWER)])
def test_branch_parse(text, branch):
    assert Branch.parse(text) is branch


@pytest.mark.parametrize("bad", ["1", 2, "upper", True])
def test_branch_parse_rejects(bad):
    with pytest.raises(ValueError):
        Branch.parse(bad)


def test_branch_tags():
    assert Branch.PRINCIPAL.tag == "Principal" and Branch.LOWER.tag == "LowerBranch"
    assert Branch.LOWER.index == -1


def test_argument_forms():
    a = Argument.parse("pow10:1e20")
    assert a.form == "pow10" and str(a) == "pow10:1e20"
    b = Argument.parse("ln:5")
    assert b.is_log and b.ell.rational == 5
    c = Argument.parse("0.25")
    assert not c.is_log and c.x.rational == Fraction(1, 4)


@pytest.mark.parametrize("text", ["ln:1", "ln:0.5", "pow10:0.4", "pow10:-3"])
def test_log_arguments_need_ell_above_one(text):
    with pytest.raises(DomainError):
        Argument.parse(text)


@pytest.mark.parametrize(
    "branch, x, region",
    [
        (0, 10, Region.GT_E),
        (0, "2.7", Region.ZERO_TO_E),
        (0, "-0.2", Region.NEG_PRINCIPAL),
        (-1, "-0.25", Region.NEG_LOWER_LEFT),
        (-1, "-0.1", Region.NEG_LOWER_RIGHT),
        (-1, "-0.3", Region.NEG_LOWER_LEFT),
        (0, "2.71828182845904523536028747135266", Region.ZERO_TO_E),
        (0, "2.71828182845904523536028747135267", Region.GT_E),
    ],
)
def test_classify_examples(branch, x, region):
    assert classify(branch, x) is region


def test_classify_log_argument_is_gte():
    assert classify(0, Argument.pow10(20)) is Region.GT_E


@pytest.mark.parametrize("branch, x", [(0, "-0.4"), (-1, "0.5"), (-1, 0), (-1, "-0.37")])
def test_locate_domain_errors(branch, x):
    with pytest.raises(DomainError):
        locate(branch, x)


def test_log_argument_on_lower_branch_is_rejected():
    with pytest.raises(DomainError):
        locate(-1, Argument.log_of(5))


@pytest.mark.parametrize("branch, x, value", [(0, E, 1), (0, 0, 0), (0, NEG_INV_E, -1), (-1, NEG_INV_E, -1)])
def test_boundary_points_locate_to_exact_values(branch, x, value):
    assert locate(branch, x) == value
    with pytest.raises(DomainError):
        classify(branch, x)


def test_interior_lambert_points_are_classified_normally():
    assert classify(-1, lambert_point(-2)) is Region.NEG_LOWER_LEFT
    assert exact_value(-1, lambert_point(-2)) == -2
    assert classify(0, lambert_point(2)) is Region.GT_E


def test_branch_gap_bits_tracks_distance_to_branch_point():
    near = ExactReal(lambda iv: -iv.exp(-1) + iv.mpf(10) ** -100, "-1/e+1e-100")
    bits = branch_gap_bits(near)
    # 1 + e x = e * 1e-100  ->  about 331 bits of cancellation
    assert 325 <= bits <= 335
    assert branch_gap_bits(real("-0.1")) == 0
    assert compare(QUARTER, "-0.25") == 0
