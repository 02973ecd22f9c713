"""The non-trivial positive solution ``y(x)`` of ``x**y = y**x``.

With ``t = -ln(x)/x`` the solution is ``y = exp(-W(t))``, taking ``W0`` for
``x > e`` and ``W-1`` for ``1 < x < e``; the curve crosses the diagonal at
``x = y = e``.  Because ``exp(-w)`` is decreasing, a certified enclosure
``[w_lo, w_hi]`` of ``W(t)`` maps to ``[exp(-w_hi), exp(-w_lo)]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import mpmath
from mpmath import libmp

from .bounds import simple_bounds
from .certify import Enclosure, eval_certified
from .domain import Branch
from .errors import DomainError
from .reals import E, ExactReal, compare, interval_working, real, round_to

__all__ = ["XyResult", "asymptote_gap", "conjecture_margin", "solve", "y_of_x"]


@dataclass(frozen=True)
class XyResult:
    """``y(x)``, the margin ``y - (1 + (e-1)**2/(x-1))`` and, for ``x >= e``, the asymptote gap."""

    x: ExactReal
    y: Enclosure
    margin: mpmath.mpf
    gap: Optional[mpmath.mpf]


def _prec(digits: int) -> int:
    return math.ceil(digits * math.log2(10)) + 64


def _t_of(x: ExactReal) -> ExactReal:
    def enclose(iv):
        X = x.enclose_in(iv)
        return -iv.log(X) / X

    return ExactReal(enclose, f"-ln({x.label})/{x.label}")


def _check_x(x) -> ExactReal:
    x = real(x)
    if compare(x, 1) <= 0:
        raise DomainError(f"x**y = y**x needs x > 1, got {x}")
    return x


def _near_e(x: ExactReal, digits: int) -> Optional[mpmath.mpf]:
    """``|x - e|`` rounded up when it is at most ``10**-digits``, else ``None``."""
    with interval_working(_prec(digits) + 32) as iv:
        lo, hi = abs(x.enclose_in(iv) - iv.e)._mpi_
    if libmp.mpf_le(hi, libmp.from_rational(1, 10**digits, 64, libmp.round_floor)):
        return mpmath.mp.make_mpf(hi)
    return None


def _from_interval(interval, prec: int):
    lo, hi = interval._mpi_
    return (
        round_to(mpmath.mp.make_mpf(lo), prec, "floor"),
        round_to(mpmath.mp.make_mpf(hi), prec, "ceiling"),
    )


def _midpoint(interval, prec: int) -> mpmath.mpf:
    lo, hi = interval._mpi_
    mid = libmp.mpf_shift(libmp.mpf_add(lo, hi, 0), -1)
    return mpmath.mp.make_mpf(libmp.mpf_pos(mid, prec, libmp.round_nearest))


def _enclosure(branch, lo, hi, method, iterations, prec, certified, region=None) -> Enclosure:
    width = mpmath.mp.make_mpf(libmp.mpf_sub(hi._mpf_, lo._mpf_, 64, libmp.round_ceiling))
    return Enclosure(branch, lo, hi, width, method, iterations, prec, certified, region)


def y_of_x(x, digits: int) -> Enclosure:
    """Enclosure of width at most ``10**-digits`` of the solution ``y(x) != x`` of ``x**y = y**x``.

    ``x = e`` gives ``e`` itself.  Inputs within ``10**-digits`` of ``e`` (but
    not equal to it) get ``e`` widened by twice ``|x - e|``, reflecting the
    curve's slope ``-1`` there; that enclosure is not certified.
    """
    digits = int(digits)
    if digits < 1:
        raise ValueError("digits must be >= 1")
    x = _check_x(x)
    prec = _prec(digits)
    if x.key == E.key:
        with interval_working(prec) as iv:
            lo, hi = _from_interval(iv.e, prec)
        return _enclosure(Branch.PRINCIPAL, lo, hi, "exact", 0, prec, True)
    dist = _near_e(x, digits)
    if dist is not None:
        with interval_working(prec) as iv:
            lo, hi = _from_interval(iv.e + iv.mpf([-2, 2]) * iv.mpf(dist), prec)
        return _enclosure(Branch.PRINCIPAL, lo, hi, "slope-at-e", 0, prec, False)

    branch = Branch.PRINCIPAL if compare(x, E, prec) > 0 else Branch.LOWER
    t = _t_of(x)
    # |dy| = y |dW|: ask W for extra digits covering the size of y
    w_lo = simple_bounds(branch, t, 64).lo
    y_digits = max(0, int(mpmath.ceil(-w_lo / mpmath.ln(10)))) if w_lo < 0 else 0
    w = eval_certified(branch, t, digits + y_digits + 2)
    wp = max(prec, w.precision_bits) + 32
    with interval_working(wp) as iv:
        lo = iv.exp(-iv.mpf(w.hi))._mpi_[0]
        hi = iv.exp(-iv.mpf(w.lo))._mpi_[1]
    lo = round_to(mpmath.mp.make_mpf(lo), wp, "floor")
    hi = round_to(mpmath.mp.make_mpf(hi), wp, "ceiling")
    return _enclosure(branch, lo, hi, "exp(-W)", w.iterations, wp, w.certified, w.region)


def conjecture_margin(x, digits: int) -> mpmath.mpf:
    """A rigorous lower bound on ``y(x) - (1 + (e-1)**2/(x-1))``, rounded down.

    A positive return value certifies the inequality at ``x``.
    """
    x = _check_x(x)
    if x.key == E.key:
        raise DomainError("the margin vanishes at x = e")
    y = y_of_x(x, digits)
    with interval_working(y.precision_bits) as iv:
        X = x.enclose_in(iv)
        bound = 1 + (iv.e - 1) ** 2 / (X - 1)
        margin = iv.mpf(y.lo) - bound
        return round_to(mpmath.mp.make_mpf(margin._mpi_[0]), y.precision_bits, "floor")


def asymptote_gap(x, digits: int) -> mpmath.mpf:
    """``(x**y(x) - x) / ln(x)**2`` evaluated to about ``digits`` digits, for ``x >= e``.

    Computed as ``(exp(-x W0(t)) - x) / ln(x)**2`` with ``t = -ln(x)/x``;
    the value tends to 1 as ``x`` grows.
    """
    digits = int(digits)
    x = _check_x(x)
    prec = _prec(digits)
    if x.key == E.key:
        with interval_working(prec) as iv:
            return _midpoint(iv.exp(iv.e) - iv.e, prec)
    if compare(x, E, prec) < 0:
        raise DomainError(f"the asymptote gap is defined for x >= e, got {x}")
    # exp(-x W) has derivative of size x**2 in W: request 2 log10(x) extra digits
    with interval_working(64) as iv:
        mag = mpmath.mp.make_mpf(iv.log(x.enclose_in(iv))._mpi_[1])
    extra = int(mpmath.ceil(2 * mag / mpmath.ln(10))) + 2
    w = eval_certified(Branch.PRINCIPAL, _t_of(x), digits + extra)
    with interval_working(w.precision_bits + 32) as iv:
        X = x.enclose_in(iv)
        W = iv.mpf([w.lo, w.hi])
        return _midpoint((iv.exp(-X * W) - X) / iv.log(X) ** 2, prec)


def solve(x, digits: int) -> XyResult:
    """``y(x)`` with its conjecture margin and, for ``x >= e``, the asymptote gap."""
    x = _check_x(x)
    y = y_of_x(x, digits)
    margin = conjecture_margin(x, digits) if x.key != E.key else mpmath.mpf(0)
    gap = asymptote_gap(x, digits) if compare(x, E) >= 0 else None
    return XyResult(x, y, margin, gap)

