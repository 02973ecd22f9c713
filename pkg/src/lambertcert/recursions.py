"""Fixed-point recursions for ``W``: the linear λ-recursion, the quadratic β-recursion,
their a priori error bounds, and the Newton / Halley / FSC reference iterations.

Iterates are ordinary floating-point values at the working precision.  The
recursions are strictly monotone in exact arithmetic; a step that moves the
wrong way by more than the rounding slack is reported as :class:`NumericalError` (the precision is too low for the input).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

import mpmath
from mpmath import libmp

from .bounds import (
    GUARD_BITS,
    branch_offset,
    compute_constants,
    neg_lower_left_start,
    neg_lower_right_start,
    neg_principal_start,
)
from .domain import (
    Argument,
    Branch,
    Region,
    as_argument,
    branch_gap_bits,
    classify,
    locate,
)
from .errors import DomainError, NumericalError, PrecisionError
from .reals import (
    check_precision,
    export,
    interval_working,
    lift,
    round_to,
    working,
)

__all__ = [
    "Argument",
    "IterationTrace",
    "Region",
    "TraceEntry",
    "beta_error_bound",
    "beta_iterate",
    "beta_start",
    "beta_step",
    "classify",
    "lambda_error_bound",
    "lambda_iterate",
    "lambda_ratio",
    "reference_iterate",
    "reference_step",
    "rounding_slack",
    "working_precision",
]

METHODS = ("Lambda", "Beta", "Newton", "Halley", "FSC")


@dataclass(frozen=True)
class TraceEntry:
    n: int
    iterate: mpmath.mpf
    apriori_bound: Optional[mpmath.mpf] = None
    residual: Optional[mpmath.mpf] = None


@dataclass(frozen=True)
class IterationTrace:
    """Per-step record of one recursion run.

    ``residual`` is ``|w e^w - x|`` for direct arguments and
    ``|w + ln w - ln x|`` for logarithmic ones.
    """

    method: str
    region: Optional[Region]
    entries: tuple[TraceEntry, ...]
    precision_bits: int

    def __iter__(self) -> Iterator[TraceEntry]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, n: int) -> TraceEntry:
        return self.entries[n]

    @property
    def iterates(self) -> list[mpmath.mpf]:
        return [e.iterate for e in self.entries]

    @property
    def last(self) -> TraceEntry:
        return self.entries[-1]


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------


def working_precision(region: Region | None, arg: Argument, prec: int) -> int:
    """``prec`` plus the bits lost to cancellation in ``1 + e x`` near the branch point."""
    if region in (Region.NEG_PRINCIPAL, Region.NEG_LOWER_LEFT):
        return prec + branch_gap_bits(arg.value, prec)
    return prec


def rounding_slack(beta, next_beta, prec: int) -> mpmath.mpf:
    """Generous bound on the round-off committed by one β-step at ``prec`` bits.

    The step divides by ``1 + beta``, so its absolute error scales like
    ``ulp(max(1, |beta'|)) / |1 + beta|``.
    """
    with working(64) as ctx:
        b, nb = lift(ctx, beta), lift(ctx, next_beta)
        scale = max(ctx.one, abs(nb), abs(b))
        denom = min(ctx.one, abs(1 + b)) if b != -1 else ctx.one
        return export(ctx.ldexp(scale / denom, -prec + 10))


def _check_region(region: Region, arg: Argument) -> None:
    if arg.is_log:
        if region is not Region.GT_E:
            raise DomainError(f"logarithmic argument {arg} only fits region GtE, not {region.value}")
        return
    actual = classify(region.branch, arg)
    if actual is not region:
        raise DomainError(f"x = {arg} lies in region {actual.value}, not {region.value}")


def _start_interval(iv, region: Region, arg: Argument):
    if region is Region.GT_E:
        ell = arg.ell.enclose_in(iv)
        return ell - iv.log(ell)
    X = arg.value.enclose_in(iv)
    if region is Region.ZERO_TO_E:
        return X / iv.e
    if region is Region.NEG_PRINCIPAL:
        return neg_principal_start(iv, X)
    if region is Region.NEG_LOWER_LEFT:
        return neg_lower_left_start(iv, X)
    return neg_lower_right_start(iv, X)


def _start_value(region: Region, arg: Argument, wp: int) -> mpmath.mpf:
    """``beta_0`` rounded to ``wp`` bits (evaluated with guard bits, so nearly correctly rounded)."""
    extra = GUARD_BITS
    if region in (Region.NEG_PRINCIPAL, Region.NEG_LOWER_LEFT):
        extra += branch_gap_bits(arg.value, wp)
    with interval_working(wp + extra) as iv:
        lo, hi = _start_interval(iv, region, arg)._mpi_
    mid = libmp.mpf_shift(libmp.mpf_add(lo, hi, 0), -1)
    return mpmath.mp.make_mpf(libmp.mpf_pos(mid, wp, libmp.round_nearest))


class _BetaKernel:
    """One β-step ``beta/(1+beta) * (1 + ln(x/beta))`` in a fixed context.

    Above ``e`` the logarithm is formed as ``ln x - ln beta`` from ``ln x``,
    so ``x`` itself is never needed (and may be astronomically large).
    """

    def __init__(self, arg: Argument, ctx, log_form: bool) -> None:
        self.ctx = ctx
        self.arg = arg
        self.log_form = log_form
        if log_form:
            self.ell = lift(ctx, arg.ell.approx(ctx.prec + 8))
            self.X = None
        else:
            self.ell = None
            self.X = lift(ctx, arg.value.approx(ctx.prec + 8))

    def step(self, beta):
        ctx = self.ctx
        beta = lift(ctx, beta)
        d = 1 + beta
        if not d:
            raise NumericalError("1 + beta vanished at working precision; increase precision")
        if self.log_form:
            if beta <= 0:
                raise NumericalError("iterate left (0, inf) in logarithmic form")
            q = self.ell - ctx.ln(beta)
        else:
            if not beta or (self.X > 0) != (beta > 0):
                raise NumericalError("x / beta is not positive; the iterate left its region")
            q = ctx.ln(self.X / beta)
        return export(beta / d * (1 + q))

    def residual(self, w):
        ctx = self.ctx
        w = lift(ctx, w)
        if self.log_form:
            return export(abs(w + ctx.ln(w) - self.ell))
        return export(abs(w * ctx.exp(w) - self.X))


# ---------------------------------------------------------------------------
# β-recursion
# ---------------------------------------------------------------------------


def beta_start(region, arg, prec: int = 128) -> mpmath.mpf:
    """The region's starting value ``beta_0``.

    GtE: ``ln x - ln ln x``; ZeroToE: ``x/e``; NegPrincipal:
    ``e x ln(1+s)/(s(1+s))`` with ``s = sqrt(1+ex)``; NegLowerLeft:
    ``-1 - sqrt(2) sqrt(1+ex)``; NegLowerRight: ``ln(-x) - ln(-ln(-x))``.
    """
    prec = check_precision(prec)
    region = Region(region) if not isinstance(region, Region) else region
    arg = as_argument(arg)
    _check_region(region, arg)
    return _start_value(region, arg, prec)


def beta_step(arg, beta, prec: int = 128) -> mpmath.mpf:
    """One step ``beta/(1+beta) * (1 + ln(x/beta))`` at ``prec`` bits."""
    prec = check_precision(prec)
    arg = as_argument(arg)
    with working(prec) as ctx:
        return _BetaKernel(arg, ctx, arg.is_log).step(beta)


def _moved_wrong_way(region: Region, prev, nxt, n: int, slack) -> bool:
    """True if ``prev -> nxt`` contradicts the region's proven monotonicity beyond ``slack``."""
    if region.is_lower and n == 0:
        # beta_0 sits above W-1 while beta_1 is below it: no ordering to check
        return False
    step = mpmath.mp.make_mpf(libmp.mpf_sub(nxt._mpf_, prev._mpf_, 0))  # exact
    if region is Region.NEG_PRINCIPAL:
        return step > slack
    return step < -slack


def _in_range(region: Region, beta) -> bool:
    if region in (Region.GT_E, Region.ZERO_TO_E):
        return beta > 0
    if region is Region.NEG_PRINCIPAL:
        return -1 < beta < 0
    return beta < -1


def _constant_trace(method: str, value: Fraction, n: int, prec: int) -> IterationTrace:
    v = mpmath.mp.make_mpf(libmp.from_rational(value.numerator, value.denominator, prec, libmp.round_nearest))
    zero = mpmath.mpf(0)
    return IterationTrace(method, None, tuple(TraceEntry(k, v, zero, zero) for k in range(n + 1)), prec)


def beta_iterate(
    branch,
    arg,
    n: int,
    prec: int = 128,
    *,
    with_bounds: bool = True,
    with_residuals: bool = False,
) -> IterationTrace:
    """Run ``beta_0 .. beta_n`` with monotonicity asserted at every step.

    Near the branch point the working precision is raised by the number of
    bits cancelled in ``1 + e x``; the trace reports the precision used.  At
    the region boundaries ``x = -1/e, 0, e`` every iterate is the exact
    branch value.
    """
    prec = check_precision(prec)
    n = int(n)
    if n < 0:
        raise ValueError("n must be >= 0")
    branch = Branch.parse(branch)
    arg = as_argument(arg)
    where = locate(branch, arg, prec)
    if isinstance(where, Fraction):
        return _constant_trace("Beta", where, n, prec)
    region = where
    wp = working_precision(region, arg, prec)
    betas = [_start_value(region, arg, wp)]
    with working(wp) as ctx:
        kernel = _BetaKernel(arg, ctx, region is Region.GT_E)
        if not _in_range(region, betas[0]):
            raise NumericalError(f"beta_0 = {betas[0]} outside the range of region {region.value}")
        for k in range(n):
            prev = betas[-1]
            nxt = kernel.step(prev)
            if not _in_range(region, nxt) and not (region.is_lower and k == 0 and nxt <= -1):
                raise NumericalError(f"beta_{k + 1} left the range of region {region.value}; increase precision")
            if _moved_wrong_way(region, prev, nxt, k, rounding_slack(prev, nxt, wp)):
                raise NumericalError(
                    f"beta_{k + 1} broke the proven monotonicity on {region.value}; increase precision"
                )
            betas.append(nxt)
        residuals = [kernel.residual(b) for b in betas] if with_residuals else [None] * len(betas)
    entries = []
    for k, b in enumerate(betas):
        bound = None
        if with_bounds:
            try:
                bound = beta_error_bound(region, arg, k, prec=64)
            except DomainError:
                bound = None
        entries.append(TraceEntry(k, b, bound, residuals[k]))
    return IterationTrace("Beta", region, tuple(entries), wp)


def _power_bound(iv, base, exponent: int):
    """``base**exponent`` for a positive interval and possibly huge integer exponent."""
    if exponent == 0:
        return iv.mpf(1)
    return iv.exp(exponent * iv.log(base))


def beta_error_bound(region, arg=None, n: int = 1, prec: int = 64, *, kind: str = "best") -> mpmath.mpf:
    """Proven upper bound on ``|W(x) - beta_n(x)|``, rounded up.

    GtE: ``min(kappa1**2**n, (e/(e-1) L2/L1)**2**n / (L1-L2)**(2**n-1))``
    (the second only when ``arg`` is given); ZeroToE:
    ``kappa2**(2**n-1) / 5``; NegPrincipal: ``10**-2**n``; NegLower*:
    ``2**-2**n``, sharpened right of ``-1/4`` by
    ``q**(2**n-1)`` with ``q = 1/(|b0| |1+b0|)``, ``b0 = beta_0``.

    ``arg=None`` asks for the uniform bound valid on the whole region.
    ``kind`` selects ``"best"`` (smallest available), ``"uniform"``, or
    ``"pointwise"`` (the x-dependent bound alone; GtE and NegLowerRight only).
    ``n = 0`` is accepted where a starting-value estimate is proven (GtE,
    ZeroToE, and NegPrincipal given ``arg``); the lower branch is only
    monotone from ``n = 1`` and refuses ``n = 0``.
    """
    prec = check_precision(prec)
    region = Region(region) if not isinstance(region, Region) else region
    n = int(n)
    if n < 0:
        raise ValueError("n must be >= 0")
    if kind not in ("best", "uniform", "pointwise"):
        raise ValueError(f"unknown bound kind {kind!r}")
    if arg is not None:
        arg = as_argument(arg)
        _check_region(region, arg)
    pointwise = kind != "uniform" and arg is not None
    if kind == "pointwise" and not (pointwise and region in (Region.GT_E, Region.NEG_LOWER_RIGHT)):
        raise DomainError(f"no x-dependent bound for region {region.value} without an argument")
    k = 1 << n  # 2**n
    wp = prec + GUARD_BITS + 8
    with interval_working(wp) as iv:
        if region is Region.GT_E:
            kappa1 = iv.log(1 + 1 / iv.e)
            candidates = [_power_bound(iv, kappa1, k)]
            if pointwise:
                L1 = arg.ell.enclose_in(iv)
                L2 = iv.log(L1)
                ratio = iv.e / (iv.e - 1) * L2 / L1
                candidates.append(_power_bound(iv, ratio, k) / _power_bound(iv, L1 - L2, k - 1))
        elif region is Region.ZERO_TO_E:
            candidates = [_power_bound(iv, 1 - 1 / iv.e, k - 1) / 5]
        elif region is Region.NEG_PRINCIPAL:
            if n == 0:
                if arg is None:
                    raise DomainError("no uniform estimate for beta_0 on NegPrincipal; pass the argument")
                with interval_working(wp + branch_gap_bits(arg.value, wp)) as iv2:
                    X = arg.value.enclose_in(iv2)
                    s = iv2.sqrt(branch_offset(iv2, X))
                    diff = neg_principal_start(iv2, X, s) - (s - 1)
                    return round_to(export(mpmath.mp.make_mpf(diff._mpi_[1])), prec, "ceiling")
            candidates = [_power_bound(iv, iv.mpf(10), k) ** -1]
        else:
            if n == 0:
                raise DomainError("the lower-branch recursion is only monotone from n = 1")
            candidates = [_power_bound(iv, iv.mpf(2), k) ** -1]
            if region is Region.NEG_LOWER_RIGHT and pointwise:
                X = arg.value.enclose_in(iv)
                b0 = neg_lower_right_start(iv, X)
                q = 1 / (abs(b0) * abs(1 + b0))
                candidates.append(candidates[0] * _power_bound(iv, q, k - 1))
        if kind == "pointwise":
            candidates = candidates[1:]
        best = min((c._mpi_[1] for c in candidates), key=lambda t: mpmath.mp.make_mpf(t))
    return mpmath.mp.make_mpf(libmp.mpf_pos(best, prec, libmp.round_ceiling))


# ---------------------------------------------------------------------------
# λ-recursion
# ---------------------------------------------------------------------------


def _gt_e_argument(x) -> tuple[Argument, Region | Fraction]:
    arg = as_argument(x)
    where = locate(Branch.PRINCIPAL, arg)
    if where == 1:
        return arg, where
    if where is not Region.GT_E:
        raise DomainError(f"the lambda recursion needs x > e, got {arg}")
    return arg, where


def _above_x_triple_star(arg: Argument, prec: int) -> bool:
    """Rigorously decide ``x > x***``; ``False`` if it cannot be ruled out."""
    digits = max(8, math.ceil(prec * 0.30103) + 4)
    for _ in range(4):
        y = compute_constants(digits).y_triple_star
        with interval_working(prec + 4 * digits) as iv:
            lo, hi = arg.ell.enclose_in(iv)._mpi_
        if libmp.mpf_gt(lo, y.hi._mpf_):
            return True
        if libmp.mpf_le(hi, y.lo._mpf_):
            return False
        digits *= 2
    return False


def lambda_error_bound(x, n: int, prec: int = 64) -> mpmath.mpf:
    """``(sqrt(2 ln 2) / (L1 - L2))**(2n) * L2``, a proven bound on ``lambda_{2n} - W0`` for ``x > x***``."""
    prec = check_precision(prec)
    n = int(n)
    if n < 0:
        raise ValueError("n must be >= 0")
    arg, where = _gt_e_argument(x)
    if where == 1 or not _above_x_triple_star(arg, prec):
        raise DomainError(f"the lambda error estimate is proven only for x > x*** (about 5.581), got {arg}")
    with interval_working(prec + GUARD_BITS) as iv:
        L1 = arg.ell.enclose_in(iv)
        L2 = iv.log(L1)
        bound = _power_bound(iv, iv.sqrt(2 * iv.log(2)) / (L1 - L2), 2 * n) * L2
        return round_to(export(mpmath.mp.make_mpf(bound._mpi_[1])), prec, "ceiling")


def lambda_iterate(
    x, n: int, prec: int = 128, *, with_bounds: bool = True, with_residuals: bool = False
) -> IterationTrace:
    """``lambda_0 = ln x``, ``lambda_{k+1} = ln x - ln lambda_k`` with the sandwich asserted.

    Odd iterates lie below ``W0(x)`` and even ones above it; every iterate
    lies in ``(1, x/e)``.  ``apriori_bound`` is filled for even indices when
    ``x > x***``.  Residuals use the same convention as the β-recursion.
    """
    prec = check_precision(prec)
    n = int(n)
    if n < 0:
        raise ValueError("n must be >= 0")
    arg, where = _gt_e_argument(x)
    if where == 1:
        return _constant_trace("Lambda", Fraction(1), n, prec)
    bounded = with_bounds and _above_x_triple_star(arg, 64)
    with working(prec) as ctx:
        ell = lift(ctx, arg.ell.approx(prec + 8))
        lams = [ell]
        for _ in range(n):
            lams.append(ell - ctx.ln(lams[-1]))
        slack = ctx.ldexp(ell, -prec + 8)
        for k, lam in enumerate(lams):
            if not (lam > 1 and ctx.ln(lam) < ell - 1 + slack):
                raise NumericalError(f"lambda_{k} left (1, x/e); increase precision")
        odds, evens = lams[1::2], lams[0::2]
        if odds and max(odds) > min(evens) + slack:
            raise NumericalError("lambda sandwich violated at working precision; increase precision")
        lams = [export(v) for v in lams]
        if with_residuals:
            kernel = _BetaKernel(arg, ctx, arg.is_log)
            residuals = [kernel.residual(v) for v in lams]
        else:
            residuals = [None] * len(lams)
    entries = []
    for k, lam in enumerate(lams):
        bound = lambda_error_bound(arg, k // 2) if bounded and k % 2 == 0 else None
        entries.append(TraceEntry(k, lam, bound, residuals[k]))
    return IterationTrace("Lambda", Region.GT_E, tuple(entries), prec)


def lambda_ratio(x, n: int, prec: int = 128) -> mpmath.mpf:
    """``(lambda_n - W0) / (W0 - lambda_{n+1})``, which tends to ``W0(x)``.

    The limit is proven above ``x***``; on ``(e, x***]`` the value is
    returned for observation only.
    """
    from .certify import eval_certified

    prec = check_precision(prec)
    arg, where = _gt_e_argument(x)
    if where == 1:
        raise DomainError("all lambda iterates equal W0(e) = 1; the ratio is 0/0")
    trace = lambda_iterate(arg, n + 1, prec, with_bounds=False)
    enc = eval_certified(Branch.PRINCIPAL, arg, max(1, math.floor(prec * 0.30103)))
    with working(prec) as ctx:
        w = lift(ctx, enc.midpoint)
        a = lift(ctx, trace[n].iterate)
        b = lift(ctx, trace[n + 1].iterate)
        denom = w - b
        if not denom:
            raise PrecisionError("lambda iterate indistinguishable from W0 at this precision")
        return export((a - w) / denom)


# ---------------------------------------------------------------------------
# reference iterations (benchmarks only)
# ---------------------------------------------------------------------------


def _step_kernel(ctx, kind: str, X, w):
    if w == -1:
        raise NumericalError(f"{kind} step undefined at w = -1")
    if kind == "Newton":
        return w - (w - X * ctx.exp(-w)) / (1 + w)
    if kind == "Halley":
        ew = ctx.exp(w)
        f = w * ew - X
        return w - f / (ew * (w + 1) - (w + 2) * f / (2 * (w + 1)))
    if kind == "FSC":
        if not w or (X > 0) != (w > 0):
            raise NumericalError("FSC step needs x / w > 0")
        z = ctx.ln(X / w) - w
        q = 2 * (1 + w) * (1 + w + 2 * z / 3)
        if q - 2 * z == 0:
            raise NumericalError("FSC step undefined: q - 2z = 0")
        return w * (1 + z * (q - z) / ((1 + w) * (q - 2 * z)))
    raise ValueError(f"unknown reference method {kind!r}")


def _method(kind: str) -> str:
    for m in METHODS[2:]:
        if kind.lower() == m.lower():
            return m
    raise ValueError(f"unknown reference method {kind!r}; use Newton, Halley or FSC")


def reference_step(kind: str, x, w, prec: int = 128) -> mpmath.mpf:
    """One Newton, Halley or FSC step towards ``W(x)`` from ``w``."""
    prec = check_precision(prec)
    kind = _method(kind)
    arg = as_argument(x)
    if arg.is_log:
        raise DomainError("reference iterations need x in direct form")
    with working(prec) as ctx:
        X = lift(ctx, arg.value.approx(prec + 8))
        return export(_step_kernel(ctx, kind, X, lift(ctx, w)))


def reference_iterate(
    kind: str, branch, x, tol, max_steps: int = 200, prec: int = 128
) -> tuple[IterationTrace, bool]:
    """Iterate a method until ``|w e^w - x| < tol``, for benchmarking.

    ``kind`` is ``"Newton"``, ``"Halley"`` or ``"FSC"`` (seeded with the
    region's ``beta_0``), ``"Beta"``, or ``"Lambda"`` (``x > e`` only, seeded
    with ``ln x``).  Returns the trace (with residuals) and whether the
    tolerance was reached within ``max_steps`` steps.  Any step failure
    counts as not converged.
    """
    prec = check_precision(prec)
    kind = {"beta": "Beta", "lambda": "Lambda"}.get(kind.lower()) or _method(kind)
    arg = as_argument(x)
    if arg.is_log:
        raise DomainError("reference iterations need x in direct form")
    region = classify(branch, arg, prec)
    if kind == "Lambda" and region is not Region.GT_E:
        raise DomainError("the lambda recursion needs x > e on the principal branch")
    wp = working_precision(region, arg, prec)
    w = _start_value(region, arg, wp) if kind != "Lambda" else None
    entries = []
    converged = False
    with working(wp) as ctx:
        X = lift(ctx, arg.value.approx(wp + 8))
        tol = lift(ctx, mpmath.mpf(tol))
        beta_kernel = _BetaKernel(arg, ctx, False)
        ell = ctx.ln(X) if kind == "Lambda" else None
        w = ell if kind == "Lambda" else lift(ctx, w)
        for k in range(max_steps + 1):
            res = abs(w * ctx.exp(w) - X)
            entries.append(TraceEntry(k, export(w), None, export(res)))
            if res < tol:
                converged = True
                break
            if k == max_steps:
                break
            try:
                if kind == "Beta":
                    w = lift(ctx, beta_kernel.step(w))
                elif kind == "Lambda":
                    w = ell - ctx.ln(w)
                else:
                    w = _step_kernel(ctx, kind, X, w)
            except (NumericalError, ValueError, ZeroDivisionError):
                break
    return IterationTrace(kind, region, tuple(entries), wp), converged
