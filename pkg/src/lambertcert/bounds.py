"""Closed-form two-sided estimates of ``W0`` and ``W-1`` and the crossover constants.

Every bound is evaluated in interval arithmetic at the caller's precision
plus :data:`GUARD_BITS`, then rounded outward (``lo`` down, ``hi`` up), so the
returned pair brackets the true branch value despite round-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import libmp

from .domain import (
    INV_E,
    QUARTER,
    Argument,
    Branch,
    Region,
    as_argument,
    branch_gap_bits,
    exact_value,
    locate,
)
from .errors import DomainError, PrecisionError
from .reals import (
    NEG_INV_E,
    ZERO,
    Pair,
    compare,
    check_precision,
    export,
    interval_working,
    real,
    round_to,
    working,
)

__all__ = [
    "GUARD_BITS",
    "BoundsPair",
    "Branch",
    "Constants",
    "classic_bounds_w0",
    "compute_constants",
    "refined_bounds_w0",
    "simple_bounds",
    "taylor_w0",
]

#: Extra bits carried while evaluating a bound, before outward rounding.
GUARD_BITS = 32


@dataclass(frozen=True)
class BoundsPair:
    """``lo <= W(x) <= hi`` with a short formula tag naming where each side came from."""

    lo: mpmath.mpf
    hi: mpmath.mpf
    lo_source: str
    hi_source: str

    def __contains__(self, value) -> bool:
        return Pair(self.lo, self.hi).__contains__(value)

    @property
    def width(self) -> mpmath.mpf:
        return Pair(self.lo, self.hi).width


@dataclass(frozen=True)
class Constants:
    """Crossover points (as enclosing pairs) and the two contraction constants.

    ``y_*`` fields are the same crossovers in log space (``x = e**y``).
    """

    digits: int
    x_star: Pair
    x_double_star: Pair
    x_triple_star: Pair
    y_star: Pair
    y_double_star: Pair
    y_triple_star: Pair
    kappa1: mpmath.mpf
    kappa2: mpmath.mpf


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _lower(interval) -> mpmath.mpf:
    return export(mpmath.mp.make_mpf(interval._mpi_[0]))


def _upper(interval) -> mpmath.mpf:
    return export(mpmath.mp.make_mpf(interval._mpi_[1]))


def _pick(lows, highs, prec: int) -> BoundsPair:
    """Tightest of several rigorous candidates, rounded outward to ``prec`` bits."""
    lo_iv, lo_src = max(lows, key=lambda c: _lower(c[0]))
    hi_iv, hi_src = min(highs, key=lambda c: _upper(c[0]))
    lo = round_to(_lower(lo_iv), prec, "floor")
    hi = round_to(_upper(hi_iv), prec, "ceiling")
    return BoundsPair(lo, hi, lo_src, hi_src)


def _exact_pair(value: Fraction, prec: int) -> BoundsPair:
    num, den = value.numerator, value.denominator
    lo = mpmath.mp.make_mpf(libmp.from_rational(num, den, prec, libmp.round_floor))
    hi = mpmath.mp.make_mpf(libmp.from_rational(num, den, prec, libmp.round_ceiling))
    return BoundsPair(lo, hi, "exact", "exact")


def branch_offset(iv, X):
    """``1 + e x`` as an interval that must lie strictly right of zero."""
    t = 1 + iv.e * X
    if not libmp.mpf_gt(t._mpi_[0], libmp.fzero):
        raise PrecisionError("precision too low to resolve 1 + e*x near the branch point")
    return t


def neg_principal_start(iv, X, s=None):
    """``e x ln(1+s) / (s (1+s))`` with ``s = sqrt(1 + e x)``."""
    if s is None:
        s = iv.sqrt(branch_offset(iv, X))
    return iv.e * X * iv.log(1 + s) / (s * (1 + s))


def neg_lower_left_start(iv, X):
    """``-1 - sqrt(2) sqrt(1 + e x)``."""
    return -1 - iv.sqrt(2) * iv.sqrt(branch_offset(iv, X))


def neg_lower_right_start(iv, X):
    """``ln(-x) - ln(-ln(-x))``."""
    lx = iv.log(-X)
    return lx - iv.log(-lx)


def _wp(where, arg: Argument, prec: int) -> int:
    wp = prec + GUARD_BITS
    if where in (Region.NEG_PRINCIPAL, Region.NEG_LOWER_LEFT):
        wp += branch_gap_bits(arg.value, prec)
    return wp


def _classic_candidates(iv, L1, L2):
    lows = [(L1 - L2 + L2 / (2 * L1), "ln x - ln ln x + ln ln x/(2 ln x)")]
    highs = [(L1 - L2 + iv.e * L2 / ((iv.e - 1) * L1), "ln x - ln ln x + e ln ln x/((e-1) ln x)")]
    return lows, highs


# ---------------------------------------------------------------------------
# public bounds
# ---------------------------------------------------------------------------


def simple_bounds(branch, x, prec: int = 128, *, sharp: bool = False) -> BoundsPair:
    """Elementary two-sided bounds for ``W_branch(x)``.

    Above ``e`` the pair is ``[ln x - ln ln x, ln x]``; with ``sharp=True`` it
    is intersected with the classical two-term bounds.  On ``(0, e)`` it is
    ``[x/e, min(x, 1)]``.  On ``(-1/e, 0)`` the principal branch uses
    ``[-1 + sqrt(1+ex), beta0]`` intersected, right of ``-1/4``, with
    ``[(sqrt(1+4x)-1)/2, sqrt(1+2x)-1]``.  The lower branch uses
    ``[beta0 - 1/2, beta0]`` left of ``-1/4`` and
    ``[e ln(-x)/(e-1), ln(-x) - ln(-ln(-x))]`` right of it.
    """
    prec = check_precision(prec)
    branch = Branch.parse(branch)
    arg = as_argument(x)
    exact = exact_value(branch, arg)
    if exact is not None:
        return _exact_pair(exact, prec)
    where = locate(branch, arg, prec)
    with interval_working(_wp(where, arg, prec)) as iv:
        if where is Region.GT_E:
            L1 = arg.ell.enclose_in(iv)
            L2 = iv.log(L1)
            lows = [(L1 - L2, "ln x - ln ln x")]
            highs = [(L1, "ln x")]
            if sharp:
                more_lo, more_hi = _classic_candidates(iv, L1, L2)
                lows += more_lo
                highs += more_hi
        elif where is Region.ZERO_TO_E:
            X = arg.value.enclose_in(iv)
            lows = [(X / iv.e, "x/e")]
            highs = [(X, "x"), (iv.mpf(1), "1")]
        elif where is Region.NEG_PRINCIPAL:
            X = arg.value.enclose_in(iv)
            s = iv.sqrt(branch_offset(iv, X))
            lows = [(s - 1, "-1 + sqrt(1+ex)")]
            highs = [(neg_principal_start(iv, X, s), "beta0")]
            if compare(arg.value, QUARTER, prec) > 0:
                lows.append(((iv.sqrt(1 + 4 * X) - 1) / 2, "(sqrt(1+4x)-1)/2"))
                highs.append((iv.sqrt(1 + 2 * X) - 1, "sqrt(1+2x)-1"))
        elif where is Region.NEG_LOWER_LEFT:
            X = arg.value.enclose_in(iv)
            b0 = neg_lower_left_start(iv, X)
            lows = [(b0 - iv.mpf(0.5), "beta0 - 1/2")]
            highs = [(b0, "beta0"), (iv.mpf(-1), "-1")]
        else:
            X = arg.value.enclose_in(iv)
            lx = iv.log(-X)
            lows = [(iv.e * lx / (iv.e - 1), "e ln(-x)/(e-1)")]
            highs = [(lx - iv.log(-lx), "ln(-x) - ln(-ln(-x))")]
        return _pick(lows, highs, prec)


def classic_bounds_w0(x, prec: int = 128) -> BoundsPair:
    """Two-term bounds ``L1 - L2 + L2/(2 L1) < W0 < L1 - L2 + e L2/((e-1) L1)`` for ``x > e``."""
    prec = check_precision(prec)
    arg = as_argument(x)
    where = locate(Branch.PRINCIPAL, arg, prec)
    exact = exact_value(Branch.PRINCIPAL, arg)
    if exact is not None and exact >= 1:
        return _exact_pair(exact, prec)
    if where is not Region.GT_E:
        raise DomainError(f"classical bounds need x > e, got {arg}")
    with interval_working(prec + GUARD_BITS) as iv:
        L1 = arg.ell.enclose_in(iv)
        L2 = iv.log(L1)
        return _pick(*_classic_candidates(iv, L1, L2), prec)


def _above_x_star(arg: Argument, prec: int) -> bool:
    """Whether ``x > x*``, decided rigorously by comparing ``ln x`` with ``y*``."""
    digits = max(8, math.ceil(prec * 0.30103) + 4)
    for _ in range(6):
        y = compute_constants(digits).y_star
        with interval_working(prec + GUARD_BITS + 4 * digits) as iv:
            lo, hi = arg.ell.enclose_in(iv)._mpi_
        if libmp.mpf_lt(hi, y.lo._mpf_):
            return False
        if libmp.mpf_gt(lo, y.hi._mpf_):
            return True
        digits *= 2
    raise PrecisionError(f"cannot place x = {arg} on either side of x*")


def refined_bounds_w0(x, prec: int = 128) -> BoundsPair:
    """Sharper bounds for ``W0`` above ``e`` built on ``L1 - L2 + L2/L1``.

    Below ``x*`` that expression is an upper bound; the lower side is the best
    of ``L1 - L2``, the classical lower bound and ``L1 - ln(upper)``.  Above
    ``x*`` it becomes a lower bound (further improved by the third-order
    expression and by ``L1 - ln(upper)``), and the upper side is the
    third-order upper estimate.
    """
    prec = check_precision(prec)
    arg = as_argument(x)
    where = locate(Branch.PRINCIPAL, arg, prec)
    exact = exact_value(Branch.PRINCIPAL, arg)
    if exact is not None and exact >= 1:
        return _exact_pair(exact, prec)
    if where is not Region.GT_E:
        raise DomainError(f"refined bounds need x > e, got {arg}")
    above = _above_x_star(arg, prec)
    with interval_working(prec + GUARD_BITS) as iv:
        L1 = arg.ell.enclose_in(iv)
        L2 = iv.log(L1)
        base = L1 - L2 + L2 / L1
        base_tag = "ln x - ln ln x + ln ln x/ln x"
        if not above:
            classic_lo, _ = _classic_candidates(iv, L1, L2)
            lows = [(L1 - L2, "ln x - ln ln x"), (L1 - iv.log(base), "ln x - ln(upper)")] + classic_lo
            highs = [(base, base_tag)]
        else:
            second = (L2 - 2) * L2 / (2 * L1**2)
            upper = base + second + L2**3 / L1**3
            lows = [
                (base, base_tag),
                (base + second - 3 * L2**2 / (2 * L1**3), "third-order lower"),
                (L1 - iv.log(upper), "ln x - ln(upper)"),
            ]
            highs = [(upper, "third-order upper")]
        return _pick(lows, highs, prec)


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------


def _f_star(iv, y):
    ly = iv.log(y)
    return iv.exp(ly / y) * (y * y - y * ly + ly) - y * y


def _f_double_star(iv, y):
    return (y - 3) * iv.log(y) - 2 * y


def _f_triple_star(iv, y):
    return y - iv.log(y) - iv.sqrt(2 * iv.log(2))


def _sign(f, y: mpmath.mpf, prec: int) -> int:
    for p in (prec, 2 * prec, 4 * prec, 8 * prec):
        with interval_working(p) as iv:
            lo, hi = f(iv, iv.mpf(y))._mpi_
        if libmp.mpf_gt(lo, libmp.fzero):
            return 1
        if libmp.mpf_lt(hi, libmp.fzero):
            return -1
    raise PrecisionError(f"cannot decide the sign at y = {y}")


def _bisect(f, a, b, digits: int, prec: int) -> Pair:
    """Root of ``f`` on ``[a, b]``, signs at both ends verified before bisecting."""
    a, b = mpmath.mpf(a), mpmath.mpf(b)
    sa, sb = _sign(f, a, prec), _sign(f, b, prec)
    if sa == sb:
        raise PrecisionError("bracket endpoints do not show opposite signs")
    tol = mpmath.mpf(10) ** -(digits + 2)
    while b - a > tol:
        m = mpmath.mp.make_mpf(libmp.mpf_shift(libmp.mpf_add(a._mpf_, b._mpf_, 0), -1))
        if _sign(f, m, prec) == sa:
            a = m
        else:
            b = m
    return Pair(a, b)


def _exp_pair(y: Pair, prec: int) -> Pair:
    with interval_working(prec) as iv:
        lo = iv.exp(iv.mpf(y.lo))._mpi_[0]
        hi = iv.exp(iv.mpf(y.hi))._mpi_[1]
    return Pair(mpmath.mp.make_mpf(lo), mpmath.mp.make_mpf(hi))


@lru_cache(maxsize=32)
def compute_constants(digits: int = 20) -> Constants:
    """Crossover constants to ``digits`` significant digits plus ``kappa1``, ``kappa2``.

    ``y*`` is the root of ``y**(1/y) (y**2 - y ln y + ln y) - y**2`` (positive
    before, negative after), ``y**`` the root of ``(y - 3) ln y - 2 y`` and
    ``y***`` the solution of ``y - ln y = sqrt(2 ln 2)`` above 1.  The
    corresponding ``x`` values are ``e**y``.  Each root is found by bisection
    with every sign decision made in interval arithmetic.
    """
    digits = int(digits)
    if digits < 1:
        raise ValueError("digits must be >= 1")
    prec = math.ceil((digits + 6) * math.log2(10)) + 32
    y1 = _bisect(_f_star, 2, 20, digits, prec)
    y2 = _bisect(_f_double_star, 2, 30, digits, prec)
    y3 = _bisect(_f_triple_star, 1, 3, digits, prec)
    with working(prec) as ctx:
        kappa1 = export(ctx.log(1 + 1 / ctx.e))
        kappa2 = export(1 - 1 / ctx.e)
    return Constants(
        digits=digits,
        x_star=_exp_pair(y1, prec),
        x_double_star=_exp_pair(y2, prec),
        x_triple_star=_exp_pair(y3, prec),
        y_star=y1,
        y_double_star=y2,
        y_triple_star=y3,
        kappa1=kappa1,
        kappa2=kappa2,
    )


# ---------------------------------------------------------------------------
# Taylor series at the origin
# ---------------------------------------------------------------------------


def taylor_w0(x, terms: int, prec: int = 128) -> mpmath.mpf:
    """Partial sum ``sum_{k=1}^{terms} (-k)**(k-1) / k! * x**k`` of the series of ``W0`` at 0."""
    prec = check_precision(prec)
    terms = int(terms)
    if terms < 1:
        raise ValueError("terms must be >= 1")
    xr = real(x)
    sign = compare(xr, ZERO)
    if sign == 0:
        return mpmath.mpf(0)
    if (sign < 0 and compare(xr, NEG_INV_E) <= 0) or (sign > 0 and compare(xr, INV_E) >= 0):
        raise DomainError(f"|x| must be below 1/e, got {xr}")
    with working(prec + 16 + terms.bit_length()) as ctx:
        X = ctx.convert(xr.approx(ctx.prec))
        total = ctx.zero
        power = ctx.one
        fact = 1
        for k in range(1, terms + 1):
            power *= X
            fact *= k
            total += ctx.mpf((-k) ** (k - 1)) / fact * power
        return round_to(export(total), prec, "nearest")

