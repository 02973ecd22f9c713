"""Branches, argument forms and the region split of the two real branch domains."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import mpmath

from .errors import DomainError, PrecisionError
from .reals import (
    E,
    NEG_INV_E,
    ZERO,
    ExactReal,
    compare,
    interval_working,
    real,
)

__all__ = [
    "Argument",
    "Branch",
    "INV_E",
    "QUARTER",
    "Region",
    "as_argument",
    "branch_gap_bits",
    "classify",
    "exact_value",
    "locate",
]

INV_E = ExactReal(lambda iv: iv.exp(-1), "1/e", key="1/e")
QUARTER = real(Fraction(-1, 4))
ONE = real(1)


class Branch(Enum):
    """Which real branch: principal ``W0`` or lower ``W-1``."""

    PRINCIPAL = 0
    LOWER = -1

    @property
    def index(self) -> int:
        return self.value

    @property
    def tag(self) -> str:
        return "Principal" if self is Branch.PRINCIPAL else "LowerBranch"

    @classmethod
    def parse(cls, value) -> "Branch":
        if isinstance(value, Branch):
            return value
        if isinstance(value, str):
            text = value.strip().lower()
            aliases = {
                "0": cls.PRINCIPAL,
                "principal": cls.PRINCIPAL,
                "w0": cls.PRINCIPAL,
                "-1": cls.LOWER,
                "lower": cls.LOWER,
                "lowerbranch": cls.LOWER,
                "w-1": cls.LOWER,
            }
            if text in aliases:
                return aliases[text]
        elif isinstance(value, int) and not isinstance(value, bool) and value in (0, -1):
            return cls(value)
        raise ValueError(f"unknown branch {value!r}; use 0 or -1")


class Region(Enum):
    """The five sub-intervals on which the quadratic recursion has its own start value."""

    GT_E = "GtE"
    ZERO_TO_E = "ZeroToE"
    NEG_PRINCIPAL = "NegPrincipal"
    NEG_LOWER_LEFT = "NegLowerLeft"
    NEG_LOWER_RIGHT = "NegLowerRight"

    @property
    def branch(self) -> Branch:
        if self in (Region.NEG_LOWER_LEFT, Region.NEG_LOWER_RIGHT):
            return Branch.LOWER
        return Branch.PRINCIPAL

    @property
    def iterates_below(self) -> bool:
        """True when the iterates approach the branch value from below (for n >= 1)."""
        return self is not Region.NEG_PRINCIPAL

    @property
    def is_lower(self) -> bool:
        return self.branch is Branch.LOWER


@dataclass(frozen=True)
class Argument:
    """The argument ``x`` given directly, as ``ell = ln x``, or as ``x = 10**exp10``.

    Logarithmic forms only make sense above ``e`` and require ``ell > 1``.
    """

    form: str
    value: ExactReal

    def __post_init__(self) -> None:
        if self.form not in ("direct", "log", "pow10"):
            raise ValueError(f"unknown argument form {self.form!r}")
        if self.form != "direct" and compare(self.ell, ONE) <= 0:
            raise DomainError(f"logarithmic argument needs ln x > 1, got {self}")

    @classmethod
    def direct(cls, x) -> "Argument":
        return cls("direct", real(x))

    @classmethod
    def log_of(cls, ell) -> "Argument":
        return cls("log", real(ell))

    @classmethod
    def pow10(cls, exp10) -> "Argument":
        return cls("pow10", real(exp10))

    @classmethod
    def parse(cls, text: str) -> "Argument":
        """Parse ``"<decimal>"``, ``"ln:<decimal>"`` or ``"pow10:<decimal>"``."""
        text = text.strip()
        if text.startswith("ln:"):
            return cls.log_of(real(text[3:]))
        if text.startswith("pow10:"):
            return cls.pow10(real(text[6:]))
        return cls.direct(real(text))

    @property
    def is_log(self) -> bool:
        return self.form != "direct"

    @property
    def x(self) -> ExactReal:
        if self.form == "direct":
            return self.value
        ell = self.ell
        return ExactReal(lambda iv: iv.exp(ell.enclose_in(iv)), f"exp({ell.label})")

    @property
    def ell(self) -> ExactReal:
        """``ln x`` as an exact real (for direct arguments this requires ``x > 0``)."""
        if self.form == "log":
            return self.value
        if self.form == "pow10":
            v = self.value
            return ExactReal(
                lambda iv: v.enclose_in(iv) * iv.log(10),
                f"{v.label}*ln(10)",
                key=("pow10-ell", v.key),
            )
        x = self.value
        return ExactReal(lambda iv: iv.log(x.enclose_in(iv)), f"ln({x.label})", key=("ln", x.key))

    def __str__(self) -> str:
        if self.form == "log":
            return f"ln:{self.value.label}"
        if self.form == "pow10":
            return f"pow10:{self.value.label}"
        return self.value.label


def as_argument(value) -> Argument:
    if isinstance(value, Argument):
        return value
    return Argument.direct(value)


#: Branch values at the region boundaries ``x = -1/e, 0, e``.
BOUNDARY_VALUES = (Fraction(-1), Fraction(0), Fraction(1))


def exact_value(branch, arg) -> Fraction | None:
    """The exact branch value when ``arg`` is a point ``w e^w`` with known rational ``w``.

    Such points come from :func:`lambertcert.reals.lambert_point` (``e``,
    ``-1/e``, ``0``, ``2 e^2``, ...).
    """
    arg = as_argument(arg)
    if arg.is_log:
        return None
    return arg.value.lambert_value(Branch.parse(branch).index)


def locate(branch, arg, prec: int = 64) -> Region | Fraction:
    """Region of ``arg`` on ``branch``; at ``x`` in ``{-1/e, 0, e}`` the exact branch value."""
    branch = Branch.parse(branch)
    arg = as_argument(arg)
    if arg.is_log:
        if branch is not Branch.PRINCIPAL:
            raise DomainError("logarithmic arguments are positive; W-1 is defined only for x < 0")
        return Region.GT_E
    x = arg.value
    exact = x.lambert_value(branch.index)
    if exact in BOUNDARY_VALUES:
        return exact
    if compare(x, NEG_INV_E, prec) < 0:
        raise DomainError(f"x = {x.label} is below the branch point -1/e")
    sign = compare(x, ZERO, prec)
    if branch is Branch.PRINCIPAL:
        if sign < 0:
            return Region.NEG_PRINCIPAL
        if compare(x, E, prec) > 0:
            return Region.GT_E
        return Region.ZERO_TO_E
    if sign >= 0:
        raise DomainError(f"W-1 is defined only on [-1/e, 0), got x = {x.label}")
    if compare(x, QUARTER, prec) <= 0:
        return Region.NEG_LOWER_LEFT
    return Region.NEG_LOWER_RIGHT


def classify(branch, x, prec: int = 64) -> Region:
    """Region tag for a point of the open branch domain other than ``-1/e``, ``0``, ``e``."""
    where = locate(branch, x, prec)
    if not isinstance(where, Region):
        raise DomainError(f"{as_argument(x)} is a special point with exact value {where}")
    return where


def branch_gap_bits(x: ExactReal, prec: int = 64) -> int:
    """Bits of cancellation in ``1 + e x``, i.e. ``max(0, -log2(1 + e x))``.

    Evaluation of anything built on ``sqrt(1 + e x)`` needs this many extra
    bits to keep its relative accuracy near the branch point.
    """
    p = max(int(prec), 64)
    for extra in (32, 128, 512, 2048, 8192, 32768, 131072):
        with interval_working(p + extra) as iv:
            t = 1 + iv.e * x.enclose_in(iv)
            lo, hi = t.a, t.b
            if lo > 0 or hi < 0:
                # interval excludes zero: its magnitude is resolved to within a factor 2
                if hi <= 2 * lo or lo >= 2 * hi:
                    mag = mpmath.mag(mpmath.mpf(min(abs(lo), abs(hi))))
                    return max(0, -int(mag))
    raise PrecisionError(f"cannot resolve 1 + e*x for x = {x.label}")
