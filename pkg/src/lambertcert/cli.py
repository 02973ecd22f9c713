"""Command-line interface: ``lambertcert <verb> [options]``.

Verbs: ``eval``, ``enclose``, ``trace``, ``constants``, ``figure``, ``bench``
and ``xyyx``.  Every real number is written as a decimal string; enclosure
endpoints are rounded outward.  Exit codes: 0 success, 2 domain error,
3 certification/precision failure, 4 malformed command line.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence, TextIO

from . import __version__
from .bounds import compute_constants
from .certify import eval_certified
from .domain import Argument, Branch, Region, locate
from .errors import CertificationError, DomainError, LambertError, NumericalError, PrecisionError
from .reals import fixed, sci, to_fraction
from .recursions import beta_iterate, lambda_iterate, reference_iterate
from .reports import BENCH_METHODS, FIGURES, bench_rows, figure_rows
from .xyyx import solve

__all__ = ["Command", "SCHEMA_VERSION", "main", "parse_args", "run"]

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_DOMAIN, EXIT_CERTIFICATION, EXIT_USAGE = 0, 2, 3, 4
DIGITS_ENV = "LAMBERT_DEFAULT_DIGITS"

#: Columns of each verb's records, in output order.
COLUMNS = {
    "eval": ("branch", "x", "digits", "value", "certified"),
    "enclose": ("branch", "x", "lo", "hi", "width", "width_bound", "method", "iterations", "precision_bits", "certified", "region"),
    "trace": ("n", "iterate", "apriori_bound", "residual"),
    "constants": ("name", "value", "lo", "hi"),
    "figure": ("x", "n", "actual_error", "bound"),
    "bench": ("x", "method", "iterations", "seconds", "status"),
    "xyyx": ("x", "y_lo", "y_hi", "margin", "gap", "certified"),
}
TABULAR = {"trace", "figure", "bench"}


@dataclass(frozen=True)
class Command:
    """A validated invocation: one verb plus its parsed options."""

    verb: str
    options: dict = field(default_factory=dict)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we need exit code 4
        raise UsageError(message)


def _default_digits() -> int:
    raw = os.environ.get(DIGITS_ENV, "34")
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{DIGITS_ENV} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise UsageError(f"{DIGITS_ENV} must be a positive integer, got {raw!r}")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _natural(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return value


def _argument(text: str) -> Argument:
    try:
        return Argument.parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    except (ValueError, TypeError):
        raise argparse.ArgumentTypeError(
            f"invalid x {text!r}; use a decimal, p/q, 'e', 'ln:<decimal>' or 'pow10:<decimal>'"
        ) from None


def _branch(text: str) -> Branch:
    try:
        return Branch.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lambertcert", description="Certified evaluation of the real Lambert W branches.")
    parser.add_argument("--version", action="version", version=f"lambertcert {__version__}")
    verbs = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def common(p, *, x=True, branch=True, digits=True):
        p.add_argument("--format", choices=("text", "json", "csv"), default=None)
        if branch:
            p.add_argument("--branch", type=_branch, default=Branch.PRINCIPAL, help="0 (principal) or -1 (lower)")
        if x:
            p.add_argument("--x", type=_argument, required=True, help="decimal, p/q, e, ln:<ell> or pow10:<k>")
        if digits:
            p.add_argument("--digits", type=_positive, default=None, help=f"decimal digits (default ${DIGITS_ENV} or 34)")

    p = verbs.add_parser("eval", help="print W(x) to the requested number of digits")
    common(p)
    p.add_argument("--relative", action="store_true", help="digits relative to max(1, |W|)")

    p = verbs.add_parser("enclose", help="print a certified enclosure [lo, hi]")
    common(p)
    p.add_argument("--relative", action="store_true", help="digits relative to max(1, |W|)")

    p = verbs.add_parser("trace", help="print the iterates of one recursion")
    common(p, digits=False)
    p.add_argument("--method", choices=("beta", "lambda", "newton", "halley", "fsc"), default="beta")
    p.add_argument("--n", type=_natural, required=True, help="last iteration index")
    p.add_argument("--prec", type=_positive, default=128, help="working precision in bits (>= 64)")

    p = verbs.add_parser("constants", help="print x*, x**, x***, kappa1, kappa2")
    common(p, x=False, branch=False)

    p = verbs.add_parser("figure", help="print convergence-figure data as CSV")
    common(p, x=False, branch=False, digits=False)
    p.add_argument("--id", dest="fig_id", choices=tuple(FIGURES), required=True)
    p.add_argument("--points", type=_positive, default=200)
    p.add_argument("--prec", type=_positive, default=256)

    p = verbs.add_parser("bench", help="iterations-to-tolerance and wall time per method")
    common(p, x=False)
    p.add_argument("--x", dest="xs", type=_argument, action="append", required=True)
    p.add_argument("--methods", default=",".join(BENCH_METHODS).lower())
    p.add_argument("--max-steps", type=_positive, default=200)

    p = verbs.add_parser("xyyx", help="solve x^y = y^x for the non-trivial y")
    common(p, branch=False)
    return parser


def _validate(verb: str, opts: dict) -> None:
    if opts.get("digits") is None and verb not in ("trace", "figure"):
        opts["digits"] = _default_digits() if verb != "constants" else 10
    if "prec" in opts and opts["prec"] < 64:
        raise UsageError("--prec must be at least 64 bits")
    if verb in ("eval", "enclose", "trace"):
        arg, branch = opts["x"], opts["branch"]
        method = opts.get("method", "beta")
        if method not in ("beta", "lambda") and arg.is_log:
            raise UsageError(f"--method {method} needs x in direct form")
        if method == "lambda" and branch is not Branch.PRINCIPAL:
            raise UsageError("--method lambda applies to the principal branch only")
        try:
            where = locate(branch, arg)
        except DomainError as exc:
            raise UsageError(str(exc)) from None
        if method == "lambda" and where != 1 and where is not Region.GT_E:
            raise UsageError(f"--method lambda needs x >= e, got {arg}")
    if verb == "xyyx":
        from .reals import compare

        if opts["x"].is_log or compare(opts["x"].value, 1) <= 0:
            raise UsageError("xyyx needs a direct x > 1")
    if verb == "bench":
        methods = []
        for name in opts["methods"].split(","):
            match = [m for m in BENCH_METHODS if m.lower() == name.strip().lower()]
            if not match:
                raise UsageError(f"unknown bench method {name!r}; choose from {', '.join(BENCH_METHODS).lower()}")
            methods.append(match[0])
        opts["methods"] = tuple(methods)
        if any(a.is_log for a in opts["xs"]):
            raise UsageError("bench needs x in direct form")


def parse_args(argv: Optional[Sequence[str]] = None) -> Command:
    """Parse and validate ``argv``; malformed input exits with status 4 and one diagnostic line."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        ns = build_parser().parse_args(argv)
        opts = {k: v for k, v in vars(ns).items() if k != "verb"}
        _validate(ns.verb, opts)
    except UsageError as exc:
        print(f"lambertcert: error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE) from None
    if opts.get("format") is None:
        opts["format"] = "csv" if ns.verb in TABULAR else "text"
    return Command(ns.verb, opts)


# ---------------------------------------------------------------------------
# verb implementations: each returns a list of records (dicts of strings)
# ---------------------------------------------------------------------------


def _opt_sci(value, sig: int = 6, rounding: str = "ceiling") -> str:
    return "" if value is None else sci(value, sig, rounding)


def _eval(o: dict) -> list[dict]:
    enc = eval_certified(o["branch"], o["x"], o["digits"], o["relative"])
    value = sci(enc.midpoint, o["digits"]) if o["relative"] else fixed(enc.midpoint, o["digits"])
    return [
        {
            "branch": str(o["branch"].index),
            "x": str(o["x"]),
            "digits": o["digits"],
            "value": value,
            "certified": enc.certified,
        }
    ]


def _enclose(o: dict) -> list[dict]:
    enc = eval_certified(o["branch"], o["x"], o["digits"], o["relative"])
    record = enc.to_record()
    record.update(x=str(o["x"]), width=sci(enc.width, 6, "ceiling") if enc.width else "0")
    return [record]


def _trace(o: dict) -> list[dict]:
    method, arg, branch, n, prec = o["method"], o["x"], o["branch"], o["n"], o["prec"]
    if method == "beta":
        trace = beta_iterate(branch, arg, n, prec, with_residuals=True)
    elif method == "lambda":
        trace = lambda_iterate(arg, n, prec, with_residuals=True)
    else:
        trace, _ = reference_iterate(method, branch, arg, 0, n, prec)
    sig = max(6, math.floor(trace.precision_bits * math.log10(2)) - 2)
    return [
        {
            "n": e.n,
            "iterate": sci(e.iterate, sig),
            "apriori_bound": _opt_sci(e.apriori_bound),
            "residual": _opt_sci(e.residual, 6, "nearest"),
        }
        for e in trace
    ]


def _positional(value, sig: int, rounding: str = "nearest") -> str:
    """``value`` in positional notation with ``sig`` significant digits."""
    q = abs(to_fraction(value))
    magnitude = math.floor(math.log10(q)) + 1 if q else 1
    return fixed(value, max(0, sig - magnitude), rounding)


def _constants(o: dict) -> list[dict]:
    digits = o["digits"]
    c = compute_constants(digits)
    rows = []
    for name in ("x_star", "x_double_star", "x_triple_star"):
        pair = getattr(c, name)
        rows.append(
            {
                "name": name,
                "value": _positional(pair.mid, digits),
                "lo": _positional(pair.lo, digits + 2, "floor"),
                "hi": _positional(pair.hi, digits + 2, "ceiling"),
            }
        )
    for name in ("kappa1", "kappa2"):
        rows.append({"name": name, "value": _positional(getattr(c, name), digits), "lo": "", "hi": ""})
    return rows


def _figure(o: dict) -> list[dict]:
    rows = figure_rows(o["fig_id"], o["points"], o["prec"])
    return [
        {
            "x": sci(r.x, 17),
            "n": r.n,
            "actual_error": sci(r.actual_error, 6, "ceiling") if r.actual_error else "0",
            "bound": sci(r.bound, 6, "floor"),
        }
        for r in rows
    ]


def _bench(o: dict) -> list[dict]:
    rows = bench_rows(o["xs"], o["branch"], o["digits"], o["methods"], o["max_steps"])
    return [
        {
            "x": r.x,
            "method": r.method,
            "iterations": r.iterations if r.iterations is not None else r.status,
            "seconds": f"{r.seconds:.6f}",
            "status": r.status,
        }
        for r in rows
    ]


def _xyyx(o: dict) -> list[dict]:
    res = solve(o["x"].value, o["digits"])
    sig = res.y.significant_digits()
    return [
        {
            "x": str(o["x"]),
            "y_lo": sci(res.y.lo, sig, "floor"),
            "y_hi": sci(res.y.hi, sig, "ceiling"),
            "margin": sci(res.margin, 12, "floor") if res.margin else "0",
            "gap": "" if res.gap is None else sci(res.gap, min(o["digits"], 30)),
            "certified": res.y.certified,
        }
    ]


HANDLERS = {
    "eval": _eval,
    "enclose": _enclose,
    "trace": _trace,
    "constants": _constants,
    "figure": _figure,
    "bench": _bench,
    "xyyx": _xyyx,
}


def _text_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return "" if value is None else str(value)


def render(verb: str, records: list[dict], fmt: str) -> str:
    """Serialize records: JSON lines, CSV with header, or plain text."""
    columns = COLUMNS[verb]
    if fmt == "json":
        lines = []
        for rec in records:
            obj = {"schema_version": SCHEMA_VERSION, "verb": verb}
            obj.update({k: rec.get(k) for k in columns})
            lines.append(json.dumps(obj))
        return "\n".join(lines) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for rec in records:
            writer.writerow([_text_value(rec.get(k)) for k in columns])
        return buf.getvalue()
    if verb == "eval":
        return "".join(f"{rec['value']}\n" for rec in records)
    if verb in TABULAR:
        lines = ["\t".join(columns)]
        lines += ["\t".join(_text_value(rec.get(k)) for k in columns) for rec in records]
        return "\n".join(lines) + "\n"
    if verb == "constants":
        out = []
        for rec in records:
            bracket = f"  [{rec['lo']}, {rec['hi']}]" if rec["lo"] else ""
            out.append(f"{rec['name']}: {rec['value']}{bracket}")
        return "\n".join(out) + "\n"
    return "".join(f"{k}: {_text_value(rec.get(k))}\n" for rec in records for k in columns)


def run(cmd: Command, stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    """Execute ``cmd``, writing results to ``stdout``; returns the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        records = HANDLERS[cmd.verb](cmd.options)
    except DomainError as exc:
        print(f"lambertcert: domain error: {exc}", file=stderr)
        return EXIT_DOMAIN
    except (CertificationError, PrecisionError, NumericalError) as exc:
        print(f"lambertcert: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_CERTIFICATION
    except LambertError as exc:  # pragma: no cover - no other subclasses today
        print(f"lambertcert: {exc}", file=stderr)
        return EXIT_CERTIFICATION
    stdout.write(render(cmd.verb, records, cmd.options["format"]))
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cmd = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return run(cmd)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
