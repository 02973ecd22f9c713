import csv
import io
import json
from fractions import Fraction

import pytest

from lambertcert import Enclosure, verify_enclosure
from lambertcert.cli import COLUMNS, SCHEMA_VERSION, main, parse_args, run
from lambertcert.domain import Argument, Branch


def invoke(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


# --- parsing ----------------------------------------------------------------------


def test_parse_eval():
    cmd = parse_args(["eval", "--branch", "0", "--x", "1", "--digits", "50"])
    assert cmd.verb == "eval" and cmd.options["digits"] == 50
    assert cmd.options["branch"] is Branch.PRINCIPAL and cmd.options["format"] == "text"


def test_parse_pow10_argument():
    cmd = parse_args(["enclose", "--branch", "0", "--x", "pow10:1e20", "--digits", "10000"])
    arg = cmd.options["x"]
    assert isinstance(arg, Argument) and arg.form == "pow10" and arg.value.rational == 10**20


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--branch", "-1", "--x", "0.5"],
        ["eval", "--x", "abc"],
        ["eval", "--x", "1", "--digits", "0"],
        ["eval", "--x", "-0.5"],
        ["eval", "--branch", "2", "--x", "1"],
        ["eval"],
        ["frobnicate"],
        [],
        ["trace", "--x", "1", "--n", "3", "--method", "lambda"],
        ["trace", "--x", "10", "--n", "3", "--method", "lambda", "--branch", "-1"],
        ["trace", "--x", "ln:5", "--n", "3", "--method", "newton"],
        ["trace", "--x", "10", "--n", "3", "--prec", "32"],
        ["bench", "--x", "10", "--methods", "secant"],
        ["figure", "--id", "7"],
        ["xyyx", "--x", "1"],
        ["eval", "--x", "ln:0.5"],
        ["eval", "--x", "1", "--format", "xml"],
    ],
)
def test_malformed_input_exits_4_with_one_line(argv, capsys):
    with pytest.raises(SystemExit) as info:
        parse_args(argv)
    assert info.value.code == 4
    err = capsys.readouterr().err
    assert err.count("\n") == 1 and err.startswith("lambertcert: error:")


def test_env_default_digits(monkeypatch):
    monkeypatch.setenv("LAMBERT_DEFAULT_DIGITS", "12")
    assert parse_args(["eval", "--x", "1"]).options["digits"] == 12
    monkeypatch.delenv("LAMBERT_DEFAULT_DIGITS")
    assert parse_args(["eval", "--x", "1"]).options["digits"] == 34


def test_env_default_digits_invalid(monkeypatch, capsys):
    monkeypatch.setenv("LAMBERT_DEFAULT_DIGITS", "many")
    assert main(["eval", "--x", "1"]) == 4


# --- verbs ---------------------------------------------------------------------------


def test_eval_prints_requested_digits(capsys):
    code, out, _ = invoke(["eval", "--x", "1", "--digits", "30"], capsys)
    assert code == 0 and out == "0.567143290409783872999968662210\n"


def test_eval_json(capsys):
    code, out, _ = invoke(["eval", "--x", "1", "--digits", "10", "--format", "json"], capsys)
    obj = json.loads(out)
    assert obj["schema_version"] == SCHEMA_VERSION and obj["value"] == "0.5671432904"
    assert obj["certified"] is True


def test_enclose_text_fields(capsys):
    code, out, _ = invoke(["enclose", "--x", "10", "--digits", "20"], capsys)
    keys = [line.split(":")[0] for line in out.splitlines()]
    for k in ("lo", "hi", "width", "method", "iterations"):
        assert k in keys


@pytest.mark.parametrize("branch, x", [("0", "10"), ("0", "-0.2"), ("-1", "-0.2"), ("-1", "-0.01"), ("0", "0.001"), ("0", "pow10:25")])
def test_enclose_round_trip_verifies(branch, x, capsys):
    code, out, _ = invoke(["enclose", "--branch", branch, "--x", x, "--digits", "40", "--format", "json"], capsys)
    assert code == 0
    rec = json.loads(out)
    assert isinstance(rec["lo"], str) and isinstance(rec["hi"], str)
    assert Fraction(rec["hi"]) - Fraction(rec["lo"]) <= Fraction(2, 10**40)
    enc = Enclosure.from_record(rec)
    assert verify_enclosure(int(branch), Argument.parse(x), enc)


def test_enclose_huge_argument(capsys):
    code, out, _ = invoke(["enclose", "--x", "pow10:1e20", "--digits", "10000", "--format", "json"], capsys)
    rec = json.loads(out)
    assert code == 0 and rec["certified"] and rec["iterations"] == 9


def test_trace_lambda_e_squared(capsys):
    code, out, _ = invoke(["trace", "--method", "lambda", "--x", "ln:2", "--n", "1"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and list(rows[0]) == ["n", "iterate", "apriori_bound", "residual"]
    assert rows[1]["n"] == "1" and abs(float(rows[1]["iterate"]) - 1.306853) < 1e-6


def test_trace_lambda_decimal_e_squared(capsys):
    code, out, _ = invoke(["trace", "--method", "lambda", "--x", "7.38905609893065", "--n", "1"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert abs(float(rows[1]["iterate"]) - 1.306853) < 1e-6


@pytest.mark.parametrize("method", ["beta", "newton", "halley", "fsc"])
def test_trace_methods(method, capsys):
    code, out, _ = invoke(["trace", "--method", method, "--x", "5", "--n", "3"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and len(rows) == 5 and all(len(r) == 4 for r in rows)


def test_constants_text_contains_x_star(capsys):
    code, out, _ = invoke(["constants"], capsys)
    assert code == 0 and any("6288.69" in line for line in out.splitlines())
    for name in ("x_star", "x_double_star", "x_triple_star", "kappa1", "kappa2"):
        assert name in out


def test_figure_two_csv_actual_below_bound(capsys):
    code, out, _ = invoke(["figure", "--id", "2"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 800
    assert all(Fraction(r["actual_error"]) < Fraction(r["bound"]) for r in rows)


def test_bench_csv(capsys):
    code, out, _ = invoke(["bench", "--x", "10", "--x", "0.5", "--digits", "30"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 10
    assert [r["x"] for r in rows] == ["0.5"] * 5 + ["10"] * 5
    assert {r["status"] for r in rows} <= {"ok", "DNF", "n/a"}


def test_xyyx_text(capsys):
    code, out, _ = invoke(["xyyx", "--x", "2", "--digits", "20"], capsys)
    fields = dict(line.split(": ", 1) for line in out.splitlines())
    assert Fraction(fields["y_lo"]) <= 4 <= Fraction(fields["y_hi"])
    assert Fraction(fields["margin"]) > 0 and fields["gap"] == ""


@pytest.mark.parametrize("verb_args", [["eval", "--x", "3"], ["trace", "--x", "3", "--n", "2"], ["constants"], ["bench", "--x", "3"], ["xyyx", "--x", "3"]])
def test_json_and_csv_are_consistent(verb_args, capsys):
    verb = verb_args[0]
    base = verb_args + (["--digits", "12"] if verb in ("eval", "bench", "xyyx") else [])
    _, out_json, _ = invoke(base + ["--format", "json"], capsys)
    _, out_csv, _ = invoke(base + ["--format", "csv"], capsys)
    objs = [json.loads(line) for line in out_json.splitlines()]
    rows = list(csv.reader(io.StringIO(out_csv)))
    assert rows[0] == list(COLUMNS[verb])
    assert len(rows) - 1 == len(objs)
    for obj in objs:
        assert obj["schema_version"] == "1" and obj["verb"] == verb
        assert set(obj) == {"schema_version", "verb", *COLUMNS[verb]}
    assert all(len(r) == len(COLUMNS[verb]) for r in rows)
    assert "\r" not in out_csv


def test_no_binary_floats_in_json(capsys):
    _, out, _ = invoke(["enclose", "--x", "3", "--digits", "20", "--format", "json"], capsys)
    obj = json.loads(out)
    assert not any(isinstance(v, float) for v in obj.values())


def test_run_exit_codes(capsys, monkeypatch):
    from lambertcert import cli
    from lambertcert.errors import CertificationError, DomainError

    cmd = parse_args(["eval", "--x", "3", "--digits", "5"])

    def boom(exc):
        def handler(opts):
            raise exc

        return handler

    monkeypatch.setitem(cli.HANDLERS, "eval", boom(DomainError("no")))
    assert run(cmd) == 2
    monkeypatch.setitem(cli.HANDLERS, "eval", boom(CertificationError("no")))
    assert run(cmd) == 3
    err = capsys.readouterr().err
    assert err.count("\n") == 2


def test_lambda_trace_below_x_triple_star_has_no_bounds(capsys):
    # x in (e, x***): the trace runs, but the lambda error estimate is unproven there
    code, out, _ = invoke(["trace", "--method", "lambda", "--x", "4", "--n", "3"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and all(r["apriori_bound"] == "" for r in rows)
