"""Certified enclosures of ``W0`` and ``W-1`` from the β-recursion.

``eval_certified`` picks the iteration count from the proven a priori bound,
runs the recursion with guard bits, places the iterate at the side of the
enclosure dictated by the region's monotonicity, and finally checks the
enclosure a posteriori: the signs of ``w e^w - x`` at both endpoints are
evaluated in outward-rounded interval arithmetic and must bracket zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

import mpmath
from mpmath import libmp

from .bounds import simple_bounds
from .domain import Argument, Branch, Region, as_argument, branch_gap_bits, exact_value, locate
from .errors import CertificationError, DomainError, NumericalError, PrecisionError
from .recursions import beta_error_bound, beta_iterate, rounding_slack
from .reals import Pair, interval_working, parse_decimal, sci, to_fraction

__all__ = [
    "GUARD_BITS",
    "Enclosure",
    "eval_certified",
    "required_iterations",
    "verify_enclosure",
]

#: Guard bits added to ``ceil(digits * log2(10))`` for the working precision.
GUARD_BITS = 64

SCHEMA_FIELDS = (
    "branch",
    "lo",
    "hi",
    "width_bound",
    "method",
    "iterations",
    "precision_bits",
    "certified",
    "region",
)


@dataclass(frozen=True)
class Enclosure:
    """``lo <= W_branch(x) <= hi`` with the metadata of how it was obtained.

    ``width_bound`` is an absolute bound on ``hi - lo``.  ``certified`` is
    only ``True`` after the endpoint sign check passed.
    """

    branch: Branch
    lo: mpmath.mpf
    hi: mpmath.mpf
    width_bound: mpmath.mpf
    method: str
    iterations: int
    precision_bits: int
    certified: bool
    region: Optional[Region] = None

    @property
    def width(self) -> mpmath.mpf:
        return Pair(self.lo, self.hi).width

    @property
    def midpoint(self) -> mpmath.mpf:
        return Pair(self.lo, self.hi).mid

    def __contains__(self, value) -> bool:
        return Pair(self.lo, self.hi).__contains__(value)

    def significant_digits(self) -> int:
        """Significant digits needed so decimal endpoints stay within the width contract."""
        # binary exponents avoid float overflow/underflow for extreme values
        mag_bits = max(mpmath.mag(self.lo), mpmath.mag(self.hi), 1)
        width_bits = mpmath.mag(self.width_bound) - 1 if self.width_bound else -self.precision_bits
        return max(1, math.ceil((mag_bits - width_bits) * math.log10(2))) + 3

    def to_record(self, sig: Optional[int] = None) -> dict:
        """JSON-ready dictionary; reals become decimal strings rounded outward."""
        sig = sig or self.significant_digits()
        return {
            "branch": str(self.branch.index),
            "lo": sci(self.lo, sig, "floor"),
            "hi": sci(self.hi, sig, "ceiling"),
            "width_bound": sci(self.width_bound, 6, "ceiling"),
            "method": self.method,
            "iterations": self.iterations,
            "precision_bits": self.precision_bits,
            "certified": self.certified,
            "region": self.region.value if self.region else None,
        }

    @classmethod
    def from_record(cls, record: dict) -> "Enclosure":
        """Rebuild an enclosure from :meth:`to_record` output (endpoints rounded outward)."""
        bits = max(64, math.ceil(max(len(record["lo"]), len(record["hi"])) * 3.33) + 16)
        region = record.get("region")
        return cls(
            branch=Branch.parse(str(record["branch"])),
            lo=parse_decimal(record["lo"], bits, "floor"),
            hi=parse_decimal(record["hi"], bits, "ceiling"),
            width_bound=parse_decimal(record["width_bound"], 64, "ceiling"),
            method=record["method"],
            iterations=int(record["iterations"]),
            precision_bits=int(record["precision_bits"]),
            certified=bool(record["certified"]),
            region=Region(region) if region else None,
        )


# ---------------------------------------------------------------------------
# iteration count
# ---------------------------------------------------------------------------


_UNIFORM_RATE = {
    # region -> (C, c) for a bound of the shape C * c**(2**n)
    Region.GT_E: (1.0, math.log(1 + math.exp(-1))),
    Region.ZERO_TO_E: (1 / (5 * (1 - math.exp(-1))), 1 - math.exp(-1)),
    Region.NEG_PRINCIPAL: (1.0, 0.1),
    Region.NEG_LOWER_LEFT: (1.0, 0.5),
    Region.NEG_LOWER_RIGHT: (1.0, 0.5),
}


def _power_of_ten_floor(digits: int) -> mpmath.mpf:
    return mpmath.mp.make_mpf(libmp.from_rational(1, 10**digits, 64, libmp.round_floor))


def required_iterations(region, arg=None, digits: int = 16) -> int:
    """Smallest ``n >= 1`` whose proven bound on ``|W - beta_n|`` is below ``10**-digits``.

    With ``arg=None`` only the region's uniform bound is used; with an
    argument, the x-dependent bound (GtE) or sharper factor (NegLowerRight)
    is used whenever it is smaller.
    """
    region = Region(region) if not isinstance(region, Region) else region
    digits = int(digits)
    if digits < 1:
        raise ValueError("digits must be >= 1")
    target = _power_of_ten_floor(digits)
    C, c = _UNIFORM_RATE[region]
    n = max(1, math.ceil(math.log2((digits * math.log(10) + math.log(C)) / math.log(1 / c))))

    def ok(k: int) -> bool:
        return beta_error_bound(region, arg, k) < target

    while not ok(n):
        n += 1
    while n > 1 and ok(n - 1):
        n -= 1
    return n


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


def _endpoints(enc):
    if isinstance(enc, (tuple, list)):
        lo, hi = enc
    else:
        lo, hi = enc.lo, enc.hi
    return mpmath.mpf(lo) if not hasattr(lo, "_mpf_") else lo, mpmath.mpf(hi) if not hasattr(hi, "_mpf_") else hi


def _sign_interval(iv, f) -> int:
    lo, hi = f._mpi_
    if libmp.mpf_gt(lo, libmp.fzero):
        return 1
    if libmp.mpf_lt(hi, libmp.fzero):
        return -1
    if lo == libmp.fzero and hi == libmp.fzero:
        return 0
    return 2  # undecided


def verify_enclosure(branch, x, enc, prec: Optional[int] = None) -> bool:
    """Rigorous check that ``[enc.lo, enc.hi]`` contains ``W_branch(x)``.

    Uses that ``w e^w`` is increasing on ``[-1, inf)`` and decreasing on
    ``(-inf, -1]``; for logarithmic arguments, that ``w + ln w`` is increasing
    for ``w > 0``.  Any ambiguity returns ``False``.
    """
    try:
        branch = Branch.parse(branch)
        arg = as_argument(x)
        lo, hi = _endpoints(enc)
        if not lo <= hi:
            return False
        exact = exact_value(branch, arg)
        if exact is not None:
            return to_fraction(lo) <= exact <= to_fraction(hi)
        where = locate(branch, arg)
    except (DomainError, PrecisionError, ValueError, TypeError):
        return False

    bits = max(_mantissa_bits(lo), _mantissa_bits(hi), 64)
    q = max(int(prec or 0), bits) + 64
    lower = branch is Branch.LOWER
    try:
        if not arg.is_log and where in (Region.NEG_PRINCIPAL, Region.NEG_LOWER_LEFT):
            q += branch_gap_bits(arg.value, q)
        with interval_working(q) as iv:
            if arg.is_log:
                ell = arg.ell.enclose_in(iv)

                def f(w):
                    return w + iv.log(w) - ell

                lo_ok = lo <= 0 or _sign_interval(iv, f(iv.mpf(lo))) in (-1, 0)
                hi_ok = hi > 0 and _sign_interval(iv, f(iv.mpf(hi))) in (1, 0)
                return lo_ok and hi_ok
            X = arg.value.enclose_in(iv)

            def f(w):
                w = iv.mpf(w)
                return w * iv.exp(w) - X

            if not lower:
                # increasing on [-1, inf): anything at or below -1 is trivially below W0
                lo_ok = lo <= -1 or _sign_interval(iv, f(lo)) in (-1, 0)
                hi_ok = hi >= -1 and _sign_interval(iv, f(hi)) in (1, 0)
            else:
                # decreasing on (-inf, -1]: anything at or above -1 is trivially above W-1
                lo_ok = lo <= -1 and _sign_interval(iv, f(lo)) in (1, 0)
                hi_ok = hi >= -1 or _sign_interval(iv, f(hi)) in (-1, 0)
            return lo_ok and hi_ok
    except (ValueError, ZeroDivisionError, PrecisionError):
        return False


def _mantissa_bits(v) -> int:
    t = v._mpf_
    return int(t[3]) if t[1] else 1


# ---------------------------------------------------------------------------
# certified evaluation
# ---------------------------------------------------------------------------


def _exact_enclosure(branch: Branch, value: Fraction, prec: int) -> Enclosure:
    num, den = value.numerator, value.denominator
    lo = mpmath.mp.make_mpf(libmp.from_rational(num, den, prec, libmp.round_floor))
    hi = mpmath.mp.make_mpf(libmp.from_rational(num, den, prec, libmp.round_ceiling))
    width = mpmath.mp.make_mpf(libmp.mpf_sub(hi._mpf_, lo._mpf_, 0))
    return Enclosure(branch, lo, hi, width, "exact", 0, prec, True, None)


def _magnitude_bits(branch: Branch, arg: Argument) -> int:
    b = simple_bounds(branch, arg, 64)
    m = max(abs(b.lo), abs(b.hi), mpmath.mpf(1))
    return int(mpmath.mag(m))


def _digits_for_target(digits: int, relative: bool, branch: Branch, arg: Argument) -> int:
    """Absolute digits that make the (possibly relative) target achievable under the a priori bounds."""
    if not relative:
        return digits
    b = simple_bounds(branch, arg, 64)
    smallest = min(abs(b.lo), abs(b.hi))
    shift = int(mpmath.floor(mpmath.log10(smallest))) if smallest > 1 else 0
    return max(1, digits - shift)


def _beta_enclosure(branch: Branch, region: Region, arg: Argument, digits: int, prec: int, relative: bool):
    n = required_iterations(region, arg, _digits_for_target(digits, relative, branch, arg))
    unit = Fraction(1, 10**digits)
    for _ in range(4):
        trace = beta_iterate(branch, arg, n, prec, with_bounds=False)
        wp = trace.precision_bits
        beta = trace.last.iterate
        prev = trace[n - 1].iterate if n >= 1 else beta
        bound = beta_error_bound(region, arg, n)
        slack = 4 * rounding_slack(prev, beta, wp)
        b, B, d = beta._mpf_, bound._mpf_, slack._mpf_
        if region.iterates_below:
            lo_t = libmp.mpf_sub(b, d, wp, libmp.round_floor)
            hi_t = libmp.mpf_add(libmp.mpf_add(b, B, 0), d, wp, libmp.round_ceiling)
        else:
            lo_t = libmp.mpf_sub(libmp.mpf_sub(b, B, 0), d, wp, libmp.round_floor)
            hi_t = libmp.mpf_add(b, d, wp, libmp.round_ceiling)
        lo, hi = mpmath.mp.make_mpf(lo_t), mpmath.mp.make_mpf(hi_t)
        width_bound = mpmath.mp.make_mpf(libmp.mpf_sub(hi_t, lo_t, 64, libmp.round_ceiling))
        if branch is Branch.PRINCIPAL and lo < -1:
            lo = mpmath.mpf(-1)
        if branch is Branch.LOWER and hi > -1:
            hi = mpmath.mpf(-1)
        target = unit * max(Fraction(1), abs(to_fraction(beta))) if relative else unit
        if to_fraction(hi) - to_fraction(lo) <= target:
            return Enclosure(branch, lo, hi, width_bound, "beta", n, wp, False, region)
        n += 1
    raise CertificationError(f"width target 10^-{digits} not reached at {prec} bits")


def eval_certified(branch, arg, digits: int, relative: bool = False) -> Enclosure:
    """Certified enclosure of ``W_branch(x)`` of width at most ``10**-digits``.

    With ``relative=True`` the width target is ``10**-digits * max(1, |W|)``.
    Special points return exact (zero-width where representable) enclosures.
    On a failed endpoint check the precision is doubled once; a second
    failure raises :class:`CertificationError`.
    """
    digits = int(digits)
    if digits < 1:
        raise ValueError("digits must be >= 1")
    branch = Branch.parse(branch)
    arg = as_argument(arg)
    p = math.ceil(digits * math.log2(10)) + GUARD_BITS
    region = locate(branch, arg, p)
    exact = exact_value(branch, arg)
    if exact is not None:
        return _exact_enclosure(branch, exact, p)
    p += _magnitude_bits(branch, arg)
    failure: Exception | None = None
    for attempt_prec in (p, 2 * p):
        try:
            enc = _beta_enclosure(branch, region, arg, digits, attempt_prec, relative)
        except (NumericalError, PrecisionError) as exc:
            failure = exc
            continue
        if verify_enclosure(branch, arg, enc, enc.precision_bits):
            return replace(enc, certified=True)
        failure = None
    msg = f"endpoint sign check failed for W{branch.index}({arg}) at {2 * p} bits"
    raise CertificationError(msg) from failure
