"""Arbitrary-precision plumbing: exact real inputs, per-thread mpmath contexts, decimal I/O.

Every real quantity handed back to callers is an ordinary :class:`mpmath.mpf`
carried at whatever precision produced it.  Inputs are coerced to
:class:`ExactReal`, which knows how to enclose the *exact* number it stands
for at any requested precision, so that certification never silently
replaces a user's ``0.1`` or ``-1/e + 10**-100`` by a nearby binary float.

mpmath's module-level context is global state; all internal arithmetic runs
in thread-local contexts instead so that concurrent calls never race on
``mp.prec``.
"""

from __future__ import annotations

import math
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Callable, Iterator, Union

import mpmath
from mpmath import libmp

__all__ = [
    "E",
    "NEG_INV_E",
    "ZERO",
    "ExactReal",
    "HighReal",
    "MIN_PRECISION",
    "Pair",
    "RealLike",
    "compare",
    "export",
    "fixed",
    "lambert_point",
    "parse_decimal",
    "real",
    "sci",
    "to_fraction",
    "working",
    "interval_working",
]

#: Public name for the arbitrary-precision carrier: an :class:`mpmath.mpf`.
HighReal = mpmath.mpf

MIN_PRECISION = 64

_ROUNDING = {
    "nearest": libmp.round_nearest,
    "floor": libmp.round_floor,
    "ceiling": libmp.round_ceiling,
}

_local = threading.local()


def _contexts() -> tuple[mpmath.MPContext, mpmath.MPIntervalContext]:
    try:
        return _local.mp, _local.iv
    except AttributeError:
        _local.mp = mpmath.MPContext()
        _local.iv = mpmath.MPIntervalContext()
        return _local.mp, _local.iv


@contextmanager
def working(prec: int) -> Iterator[mpmath.MPContext]:
    """Yield this thread's private mpmath context set to ``prec`` bits."""
    ctx = _contexts()[0]
    saved = ctx.prec
    ctx.prec = int(prec)
    try:
        yield ctx
    finally:
        ctx.prec = saved


@contextmanager
def interval_working(prec: int) -> Iterator[mpmath.MPIntervalContext]:
    """Yield this thread's private interval context set to ``prec`` bits."""
    ctx = _contexts()[1]
    saved = ctx.prec
    ctx.prec = int(prec)
    try:
        yield ctx
    finally:
        ctx.prec = saved


def export(value) -> mpmath.mpf:
    """Return ``value`` as a global-context :class:`mpmath.mpf` without rounding."""
    return mpmath.mp.make_mpf(value._mpf_)


def lift(ctx: mpmath.MPContext, value):
    """Re-home an mpf-like value into ``ctx`` exactly (no rounding)."""
    if hasattr(value, "_mpf_"):
        return ctx.make_mpf(value._mpf_)
    return ctx.convert(value)


# ---------------------------------------------------------------------------
# Exact reals
# ---------------------------------------------------------------------------


def _is_dyadic(q: Fraction) -> bool:
    d = q.denominator
    return d & (d - 1) == 0


class ExactReal:
    """An exactly specified real number that can be enclosed at any precision.

    ``enclose`` receives an :class:`mpmath.MPIntervalContext` already set to
    the requested precision and must return an interval containing the
    number.  ``lambert`` maps a branch index (0 or -1) to the exact value of
    that branch at this point, when it is known rationally (``x = w e^w``).
    """

    __slots__ = ("_enclose", "label", "rational", "key", "lambert")

    def __init__(
        self,
        enclose: Callable[[mpmath.MPIntervalContext], object],
        label: str,
        *,
        rational: Fraction | None = None,
        key: object = None,
        lambert: dict[int, Fraction] | None = None,
    ) -> None:
        self._enclose = enclose
        self.label = label
        self.rational = rational
        self.key = key if key is not None else ("expr", id(self))
        self.lambert = dict(lambert or {})

    def __repr__(self) -> str:
        return f"ExactReal({self.label})"

    def __str__(self) -> str:
        return self.label

    @property
    def is_dyadic(self) -> bool:
        return self.rational is not None and _is_dyadic(self.rational)

    def enclose_in(self, ctx: mpmath.MPIntervalContext):
        """Interval enclosure in an interval context the caller already configured."""
        return self._enclose(ctx)

    def interval(self, prec: int) -> tuple[tuple, tuple]:
        """Raw ``(lo, hi)`` mpf tuples enclosing the number at ``prec`` bits."""
        with interval_working(prec) as iv:
            return self._enclose(iv)._mpi_

    def approx(self, prec: int) -> mpmath.mpf:
        """Nearest approximation at ``prec`` bits; dyadic values come back exactly."""
        if self.rational is not None:
            q = self.rational
            if _is_dyadic(q):
                v = libmp.from_man_exp(q.numerator, -(q.denominator.bit_length() - 1))
            else:
                v = libmp.from_rational(q.numerator, q.denominator, prec, libmp.round_nearest)
            return mpmath.mp.make_mpf(v)
        lo, hi = self.interval(prec + 20)
        mid = libmp.mpf_shift(libmp.mpf_add(lo, hi, prec + 24), -1)
        return mpmath.mp.make_mpf(libmp.mpf_pos(mid, prec, libmp.round_nearest))

    def lambert_value(self, branch_index: int) -> Fraction | None:
        return self.lambert.get(branch_index)


def _rational_real(q: Fraction, label: str | None = None) -> ExactReal:
    num, den = q.numerator, q.denominator
    if den == 1:
        enclose = lambda iv: iv.mpf(num)  # noqa: E731
    else:
        enclose = lambda iv: iv.mpf(num) / iv.mpf(den)  # noqa: E731
    if label is None:
        label = str(num) if den == 1 else _fraction_label(q)
    lam = {0: Fraction(0)} if q == 0 else None
    return ExactReal(enclose, label, rational=q, key=("q", q), lambert=lam)


def _fraction_label(q: Fraction) -> str:
    d = q.denominator
    k2 = (d & -d).bit_length() - 1
    rest = d >> k2
    k5 = 0
    while rest % 5 == 0:
        rest //= 5
        k5 += 1
    if rest == 1:
        # terminating decimal
        places = max(k2, k5)
        return fixed(q, places)
    return f"{q.numerator}/{d}"


def lambert_point(w) -> ExactReal:
    """The exact point ``x = w e^w`` for rational ``w``; its Lambert value is known.

    ``lambert_point(1)`` is ``e`` (W0 = 1) and ``lambert_point(-2)`` is
    ``-2 e^-2`` (W-1 = -2).
    """
    q = Fraction(w) if not isinstance(w, str) else Fraction(w.strip())
    num, den = q.numerator, q.denominator

    def enclose(iv):
        wi = iv.mpf(num) if den == 1 else iv.mpf(num) / iv.mpf(den)
        return wi * iv.exp(wi)

    lam: dict[int, Fraction] = {}
    if q >= -1:
        lam[0] = q
    if q <= -1:
        lam[-1] = q
    label = {1: "e", -1: "-1/e", 0: "0"}.get(q, f"({q})*e^({q})")
    if q == 0:
        return ZERO
    return ExactReal(enclose, label, key=("lambert", q), lambert=lam)


ZERO = _rational_real(Fraction(0), "0")
E = lambert_point(1)
NEG_INV_E = lambert_point(-1)

RealLike = Union[ExactReal, int, float, str, Fraction, Decimal, "mpmath.mpf"]


def real(value) -> ExactReal:
    """Coerce a user-supplied number to :class:`ExactReal`.

    Accepted: ``ExactReal``; ``int``; finite ``float`` (taken at its exact
    binary value); ``Fraction``/``Decimal``; decimal or ``p/q`` strings, plus
    the names ``"e"`` and ``"-1/e"``; any mpf-like value (exact binary value);
    and the constant :data:`mpmath.e`.
    """
    if isinstance(value, ExactReal):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not real arguments")
    if isinstance(value, mpmath.ctx_mp_python._constant):
        if value is mpmath.e or getattr(value, "name", "") == "e":
            return E
        raise TypeError(f"unsupported mpmath constant {value!r}")
    if isinstance(value, str):
        text = value.strip()
        if text in ("e", "E"):
            return E
        if text in ("-1/e", "-1/E", "-exp(-1)"):
            return NEG_INV_E
        try:
            q = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a real number: {value!r}") from exc
        return ZERO if q == 0 else _rational_real(q, text)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite argument {value!r}")
        q = Fraction(value)
    elif isinstance(value, (int, Fraction, Decimal)):
        if isinstance(value, Decimal) and not value.is_finite():
            raise ValueError(f"non-finite argument {value!r}")
        q = Fraction(value)
    elif hasattr(value, "_mpf_"):
        q = to_fraction(value)
    else:
        raise TypeError(f"cannot interpret {type(value).__name__} as a real number")
    return ZERO if q == 0 else _rational_real(q)


def compare(a, b, prec: int = 64) -> int:
    """Sign of ``a - b`` for exact reals, refining precision until decided.

    Raises :class:`PrecisionError` when the two cannot be separated within a
    generous refinement budget, which in practice means they are equal
    numbers given through different expressions.
    """
    from .errors import PrecisionError

    a, b = real(a), real(b)
    if a.key == b.key:
        return 0
    if a.rational is not None and b.rational is not None:
        return (a.rational > b.rational) - (a.rational < b.rational)
    p = max(int(prec), MIN_PRECISION)
    for extra in (16, 128, 512, 2048, 8192, 32768):
        q = p + extra
        alo, ahi = a.interval(q)
        blo, bhi = b.interval(q)
        if libmp.mpf_lt(ahi, blo):
            return -1
        if libmp.mpf_gt(alo, bhi):
            return 1
    raise PrecisionError(f"cannot separate {a.label} from {b.label} at {p + 32768} bits")


# ---------------------------------------------------------------------------
# Interval pairs and decimal I/O
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Pair:
    """A closed interval ``[lo, hi]`` of mpf endpoints."""

    lo: mpmath.mpf
    hi: mpmath.mpf

    @property
    def mid(self) -> mpmath.mpf:
        s = libmp.mpf_add(self.lo._mpf_, self.hi._mpf_, 0)
        return mpmath.mp.make_mpf(libmp.mpf_shift(s, -1))

    @property
    def width(self) -> mpmath.mpf:
        return _exact_diff(self.hi, self.lo)

    def __contains__(self, value) -> bool:
        q = to_fraction(value) if not isinstance(value, Fraction) else value
        return to_fraction(self.lo) <= q <= to_fraction(self.hi)


def _bits(v) -> int:
    t = v._mpf_
    return t[3] if t[1] else 1


def _exact_diff(a, b) -> mpmath.mpf:
    return mpmath.mp.make_mpf(libmp.mpf_sub(a._mpf_, b._mpf_, 0))


def to_fraction(value) -> Fraction:
    """Exact rational value of an mpf-like number."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, float, Decimal)) and not isinstance(value, bool):
        if isinstance(value, int) or math.isfinite(value):
            return Fraction(value)
        raise ValueError("non-finite value")
    t = value._mpf_
    if t in (libmp.fnan, libmp.finf, libmp.fninf):
        raise ValueError("non-finite value")
    p, q = libmp.to_rational(t)
    return Fraction(p, q)


def _round_fraction(q: Fraction, rounding: str) -> int:
    if rounding == "floor":
        return math.floor(q)
    if rounding == "ceiling":
        return math.ceil(q)
    if rounding == "nearest":
        return math.floor(q + Fraction(1, 2))
    raise ValueError(f"unknown rounding {rounding!r}")


def fixed(value, places: int, rounding: str = "nearest") -> str:
    """Fixed-point decimal string with ``places`` fractional digits, exactly rounded."""
    q = to_fraction(value)
    n = _round_fraction(q * 10**places, rounding)
    sign = "-" if n < 0 else ""
    digits = str(abs(n))
    if places == 0:
        return sign + digits
    digits = digits.rjust(places + 1, "0")
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def sci(value, sig: int = 6, rounding: str = "nearest") -> str:
    """Scientific-notation decimal string with ``sig`` significant digits, exactly rounded.

    Works for magnitudes far outside the hardware float range.
    """
    q = to_fraction(value)
    if q == 0:
        return "0"
    t = value._mpf_ if hasattr(value, "_mpf_") else None
    if t is not None and t[1]:
        k = math.floor((t[2] + t[3] - 1) * math.log10(2))
    else:
        k = math.floor(math.log10(abs(float(q)))) if abs(q) > 0 else 0
    aq = abs(q)
    while Fraction(10) ** k > aq:
        k -= 1
    while Fraction(10) ** (k + 1) <= aq:
        k += 1
    scale = Fraction(10) ** (k - sig + 1)
    n = _round_fraction(q / scale, rounding)
    if abs(n) >= 10**sig:
        k += 1
        scale = Fraction(10) ** (k - sig + 1)
        n = _round_fraction(q / scale, rounding)
    sign = "-" if n < 0 else ""
    digits = str(abs(n))
    mant = digits[0] + ("." + digits[1:] if len(digits) > 1 else "")
    return f"{sign}{mant}e{k:+d}"


def parse_decimal(text: str, prec: int, rounding: str = "nearest") -> mpmath.mpf:
    """Parse a decimal (or ``p/q``) string to an mpf with directed rounding."""
    q = Fraction(text.strip())
    return mpmath.mp.make_mpf(
        libmp.from_rational(q.numerator, q.denominator, int(prec), _ROUNDING[rounding])
    )


def round_to(value, prec: int, rounding: str):
    """Round an mpf-like value to ``prec`` bits in the given direction."""
    return mpmath.mp.make_mpf(libmp.mpf_pos(value._mpf_, int(prec), _ROUNDING[rounding]))


def check_precision(prec: int) -> int:
    from .errors import PrecisionError

    prec = int(prec)
    if prec < MIN_PRECISION:
        raise PrecisionError(f"precision_bits must be >= {MIN_PRECISION}, got {prec}")
    return prec
