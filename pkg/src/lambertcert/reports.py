"""Data behind the convergence figures and the solver benchmark table.

Figure rows compare the actual iterate error ``|W - beta_n|`` (against a
certified self-oracle at four times the working precision) with the proven
bound ``E_n``.  Benchmark rows count iterations until ``|w e^w - x| < 10**-digits``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import mpmath
from mpmath import libmp

from .certify import eval_certified
from .domain import Branch, Region, as_argument
from .errors import DomainError
from .reals import E, NEG_INV_E, check_precision, real, to_fraction, working
from .recursions import beta_error_bound, beta_iterate, reference_iterate

__all__ = [
    "BENCH_METHODS",
    "FIGURES",
    "BenchRow",
    "FigureRow",
    "bench_rows",
    "figure_grid",
    "figure_rows",
]

BENCH_METHODS = ("Beta", "FSC", "Halley", "Lambda", "Newton")
FIGURE_ITERATIONS = (1, 2, 3, 4)


@dataclass(frozen=True)
class FigureSpec:
    branch: Branch
    spacing: str  # "log" or "linear"
    left: object
    right: object
    bound_kind: str  # passed to beta_error_bound
    description: str


FIGURES = {
    "1": FigureSpec(Branch.PRINCIPAL, "log", E, 10**6, "pointwise", "W0 on (e, 1e6), x-dependent bound"),
    "2": FigureSpec(Branch.PRINCIPAL, "linear", 0, E, "uniform", "W0 on (0, e), uniform bound"),
    "3": FigureSpec(Branch.PRINCIPAL, "linear", NEG_INV_E, 0, "uniform", "W0 on (-1/e, 0), uniform bound"),
    "4a": FigureSpec(Branch.LOWER, "linear", NEG_INV_E, 0, "uniform", "W-1 on (-1/e, 0), uniform bound"),
    "4b": FigureSpec(Branch.LOWER, "linear", "-1/4", 0, "pointwise", "W-1 on (-1/4, 0), sharper bound"),
}


@dataclass(frozen=True)
class FigureRow:
    x: mpmath.mpf
    n: int
    actual_error: mpmath.mpf
    bound: mpmath.mpf


@dataclass(frozen=True)
class BenchRow:
    x: str
    method: str
    iterations: Optional[int]  # None: did not finish within the step cap
    seconds: float
    status: str  # "ok", "DNF" or "n/a"


def figure_grid(fig_id: str, points: int = 200, prec: int = 128) -> list[mpmath.mpf]:
    """``points`` grid abscissae strictly inside the figure's interval, one step from each end."""
    spec = FIGURES[fig_id]
    with working(prec + 16) as ctx:
        a = ctx.convert(real(spec.left).approx(prec + 16))
        b = ctx.convert(real(spec.right).approx(prec + 16))
        if spec.spacing == "log":
            la, lb = ctx.ln(a), ctx.ln(b)
            grid = [ctx.exp(la + (lb - la) * k / (points + 1)) for k in range(1, points + 1)]
        else:
            grid = [a + (b - a) * k / (points + 1) for k in range(1, points + 1)]
        return [mpmath.mp.make_mpf(libmp.mpf_pos(v._mpf_, prec, libmp.round_nearest)) for v in grid]


def figure_rows(
    fig_id: str,
    points: int = 200,
    prec: int = 256,
    iterations: Sequence[int] = FIGURE_ITERATIONS,
) -> list[FigureRow]:
    """Rows ``(x, n, |W - beta_n|, E_n)`` over the figure's grid, sorted by ``x`` then ``n``."""
    if fig_id not in FIGURES:
        raise DomainError(f"unknown figure id {fig_id!r}; choose from {', '.join(FIGURES)}")
    prec = check_precision(prec)
    spec = FIGURES[fig_id]
    oracle_digits = math.ceil(4 * prec * math.log10(2))
    rows = []
    for x in figure_grid(fig_id, points, prec):
        arg = as_argument(x)
        trace = beta_iterate(spec.branch, arg, max(iterations), prec, with_bounds=False)
        truth = eval_certified(spec.branch, arg, oracle_digits).midpoint
        region = trace.region
        for n in iterations:
            kind = spec.bound_kind
            if kind == "pointwise" and region not in (Region.GT_E, Region.NEG_LOWER_RIGHT):
                kind = "uniform"
            bound = beta_error_bound(region, arg, n, kind=kind)
            actual = abs(mpmath.mp.make_mpf(libmp.mpf_sub(truth._mpf_, trace[n].iterate._mpf_, 0)))
            rows.append(FigureRow(x, n, actual, bound))
    rows.sort(key=lambda r: (to_fraction(r.x), r.n))
    return rows


def bench_rows(
    xs: Sequence,
    branch=0,
    digits: int = 34,
    methods: Sequence[str] = BENCH_METHODS,
    max_steps: int = 200,
) -> list[BenchRow]:
    """Iterations and wall time for each method to reach ``|w e^w - x| < 10**-digits``.

    Methods that exceed ``max_steps`` (or break down) report ``DNF``; the
    λ-recursion is reported ``n/a`` where it does not apply (``x <= e``).
    """
    branch = Branch.parse(branch)
    prec = math.ceil(digits * math.log2(10)) + 64
    tol = mpmath.mp.make_mpf(libmp.from_rational(1, 10**digits, 64, libmp.round_floor))
    keyed = []
    for x in xs:
        arg = as_argument(x)
        key = to_fraction(arg.value.approx(128))
        for method in methods:
            start = time.perf_counter()
            try:
                trace, converged = reference_iterate(method, branch, arg, tol, max_steps, prec)
            except DomainError:
                keyed.append((key, method, BenchRow(str(arg), method, None, 0.0, "n/a")))
                continue
            seconds = time.perf_counter() - start
            if converged:
                row = BenchRow(str(arg), method, len(trace) - 1, seconds, "ok")
            else:
                row = BenchRow(str(arg), method, None, seconds, "DNF")
            keyed.append((key, method, row))
    keyed.sort(key=lambda item: (item[0], item[1]))
    return [row for _, _, row in keyed]
