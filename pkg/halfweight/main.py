#!/usr/bin/env python3
"""
main.py  —  command line for building forms and checking their coefficients
• build   finalize a named form or FormSpec string into a coefficient file
• lift    Shimura lift of a half-integral weight file at a square-free t
• hecke   T(p²), T(p) or U(p) of a file, optionally with an eigenvalue report
• signs   R_tot / R_fund tables as CSV, subsequence sign reports as JSON
• verify  plus-space, recurrence, bounds and twisted-class suites as JSON

Usage:
    python -m halfweight.main build --form delta --prec 10000 --out delta.txt
    python -m halfweight.main signs --in delta.txt --X-list 10,100,1000,10000 --csv t1.csv
    python -m halfweight.main verify --in delta.txt --suite recurrence --t 1,5 --json rec.json

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from math import isqrt

import simplejson
from tqdm import tqdm

from . import settings
from .arith import ArithError, DirichletCharacter, chi_t_N
from .coeffile import CoefficientFileError, read_form, write_form
from .formspec import FormSpecError
from .forms import FormError, HalfIntegralForm, IntegralForm, build_form, plus_space_check
from .hecke import (
    HeckeError,
    extend_power_sequence,
    extract_eigenvalue,
    hecke_eigenvalue,
    integral_eigenvalue,
    local_power_sequence,
    recurrence_check,
    shimura_lift,
    t_integral,
    t_square_half,
    u_operator,
)
from .qseries import QSeriesError
from .signs import (
    SignStatsError,
    r_plus_fund,
    r_plus_tot,
    render_ratio,
    sign_report,
    squarefree_sign_survey,
    subseq_t_n2,
    table_digits,
    twist_witnesses,
)

INPUT_ERRORS = (
    ArithError,
    QSeriesError,
    FormSpecError,
    FormError,
    HeckeError,
    SignStatsError,
    CoefficientFileError,
)
TABLE_XS = (10, 100, 1_000, 10_000, 100_000)
CSV_FIELDS = ("X", "R_tot", "R_fund")


class UsageError(ValueError):
    pass


# ── helpers ───────────────────────────────────────────────────────────────────
def _ints(text: str, what: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise UsageError(f"{what}: expected comma-separated integers, got {text!r}") from e


def _dprime(text: str) -> tuple[list[int], list[int]]:
    """'3:+1,5:-1' → ([3, 5], [1, -1])"""
    primes, eps = [], []
    for item in filter(None, (s.strip() for s in text.split(","))):
        p, sep, e = item.partition(":")
        try:
            if not sep:
                raise ValueError(item)
            primes.append(int(p))
            eps.append(int(e))
        except ValueError as err:
            raise UsageError(f"--dprime: expected 'p:eps', got {item!r}") from err
    return primes, eps


def _progress(items, desc: str):
    return tqdm(items, desc=desc, ncols=80, disable=not sys.stderr.isatty())


def _half(f, what: str) -> HalfIntegralForm:
    if not isinstance(f, HalfIntegralForm):
        raise UsageError(
            f"{what} needs a half-integral weight form, {f.name} has weight {f.weight}"
        )
    return f


def _emit_json(payload: dict, path: str | None) -> None:
    text = simplejson.dumps(payload, sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"✔️  report → {path}")
    else:
        sys.stdout.write(text)


# ── build ─────────────────────────────────────────────────────────────────────
def check_prec(prec: int, huge: bool) -> int:
    if prec < 1:
        raise UsageError(f"--prec must be positive, got {prec}")
    if prec > settings.MAX_PREC:
        raise UsageError(f"--prec {prec} exceeds HALFWEIGHT_MAX_PREC={settings.MAX_PREC}")
    if prec > settings.DEFAULT_PREC:
        if not huge:
            raise UsageError(f"--prec {prec} is above {settings.DEFAULT_PREC}; pass --huge")
        logging.warning("precision %d: expect several GB of memory and long runtimes", prec)
    return prec


def cmd_build(args) -> int:
    prec = check_prec(args.prec or settings.DEFAULT_PREC, args.huge)
    metadata = {}
    if args.level:
        metadata["level"] = args.level
    if args.character:
        metadata["character"] = DirichletCharacter.parse(args.character)
    f = build_form(args.form, prec, **metadata)
    write_form(f, args.out)
    print(f"✔️  {f.name} to precision {f.prec} → {args.out}")
    return 0


# ── lift ──────────────────────────────────────────────────────────────────────
def cmd_lift(args) -> int:
    f = _half(read_form(args.input), "lift")
    lift = shimura_lift(f, args.t)
    write_form(lift.as_form(), args.out, lift_t=args.t, source=f.name)
    print(f"✔️  lift of {f.name} at t={args.t}, precision {lift.prec} → {args.out}")
    return 0


# ── hecke ─────────────────────────────────────────────────────────────────────
def cmd_hecke(args) -> int:
    f = read_form(args.input)
    if args.op == "tsq":
        image = t_square_half(args.p, _half(f, "T(p^2)"))
    elif args.op == "tp":
        if not isinstance(f, IntegralForm):
            raise UsageError(
                f"T(p) needs an integral weight form, {f.name} has weight {f.weight}"
            )
        image = t_integral(args.p, f)
    else:
        image = u_operator(args.p, f)
    if args.out:
        write_form(image, args.out)
        print(f"✔️  {image.name} to precision {image.prec} → {args.out}")
    if not args.verify_eigen:
        return 0
    k = f.k if args.op != "u" else None
    report = extract_eigenvalue(f, image, args.p, k)
    _emit_json(report.model_dump(mode="json"), args.json)
    if not report.is_eigen:
        return 1
    if k is not None and not (report.deligne and report.elementary_bound):
        return 1
    return 0


# ── signs ─────────────────────────────────────────────────────────────────────
def _table(f, xs: list[int], stats: set[str]) -> str:
    out = io.StringIO()
    w = csv.DictWriter(out, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for X in _progress(xs, "ratios"):
        row = {"X": X, "R_tot": "", "R_fund": ""}
        if "tot" in stats:
            row["R_tot"] = render_ratio(r_plus_tot(f, X).ratio, table_digits(X))
        if "fund" in stats:
            row["R_fund"] = render_ratio(r_plus_fund(f, X).ratio, table_digits(X))
        w.writerow(row)
    return out.getvalue()


def cmd_signs(args) -> int:
    f = read_form(args.input)
    stats = set(filter(None, args.stats.split(",")))
    if stats - {"tot", "fund"}:
        raise UsageError(f"--stats: unknown statistic(s) {sorted(stats - {'tot', 'fund'})}")
    if args.X_list:
        xs = _ints(args.X_list, "--X-list")
    else:
        xs = [X for X in TABLE_XS if X <= f.prec]
        logging.info("no --X-list, using %s", xs)

    if args.t is not None or args.powers_p is not None or args.dprime is not None:
        return _subsequence_report(f, args, xs)

    text = _table(f, xs, stats)
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
        print(f"✔️  {len(xs)} rows → {args.csv}")
    else:
        sys.stdout.write(text)
    return 0


def _subsequence_report(f, args, xs: list[int]) -> int:
    t = args.t or 1
    if args.powers_p is not None:
        p = args.powers_p
        values = local_power_sequence(_half(f, "--powers-p"), t, p)
        if args.extend and args.extend >= len(values):
            eigen = hecke_eigenvalue(f, p)
            if not eigen.is_eigen:
                raise HeckeError(f"{f.name} is not a T({p}^2) eigenform: {eigen.diagnostic}")
            values = extend_power_sequence(
                values[0], eigen.eigenvalue, chi_t_N(f.k, f.level, t, p), p, f.k,
                args.extend, f.character.square()(p),
            )
        report = sign_report(f"a({t}*{p}^(2m))", len(values), values)
        report.entries = values
    elif args.dprime is not None:
        primes, eps = _dprime(args.dprime)
        X = max(xs) if xs else f.prec
        report = squarefree_sign_survey(_half(f, "--dprime"), X, primes, eps)
    else:
        X = isqrt(f.prec // t)
        values = subseq_t_n2(f, t, X)
        report = sign_report(f"a({t}*n^2)", X, values)
        report.entries = values
    _emit_json(report.model_dump(mode="json"), args.json)
    return 0


# ── verify ────────────────────────────────────────────────────────────────────
def _suite_plus_space(f, args) -> tuple[bool, list[dict]]:
    bad = plus_space_check(_half(f, "plus-space"))
    return not bad, [{"n": n, "value": f[n]} for n in bad]


def _suite_recurrence(f, args) -> tuple[bool, list[dict]]:
    f = _half(f, "recurrence")
    results = []
    for p in _progress(_ints(args.p or "3,5,7", "--p"), "recurrence"):
        eigen = hecke_eigenvalue(f, p)
        if not eigen.is_eigen:
            results.append({"p": p, "passed": False, "diagnostic": eigen.diagnostic})
            continue
        for t in _ints(args.t or "1", "--t"):
            results.append(recurrence_check(f, t, p, eigen.eigenvalue).model_dump(mode="json"))
    return all(r["passed"] for r in results), results


def _suite_bounds(f, args) -> tuple[bool, list[dict]]:
    results = []
    for p in _progress(_ints(args.p or "3,5,7", "--p"), "bounds"):
        if isinstance(f, HalfIntegralForm):
            report = hecke_eigenvalue(f, p)
        else:
            report = integral_eigenvalue(f, p)
        results.append(report.model_dump(mode="json"))
    ok = all(r["is_eigen"] and r["deligne"] and r["elementary_bound"] for r in results)
    return ok, results


def _suite_twists(f, args) -> tuple[bool, list[dict]]:
    f = _half(f, "twists")
    X = args.X or min(10_000, f.prec)
    reports = [twist_witnesses(f, p, X) for p in _ints(args.p or "3,5,7", "--p")]
    return all(r.passed for r in reports), [
        {**r.model_dump(mode="json"), "passed": r.passed} for r in reports
    ]


SUITES = {
    "plus-space": _suite_plus_space,
    "recurrence": _suite_recurrence,
    "bounds": _suite_bounds,
    "prop2": _suite_twists,
    "twists": _suite_twists,
}


def cmd_verify(args) -> int:
    f = read_form(args.input)
    passed, results = SUITES[args.suite](f, args)
    logging.info("suite %s on %s: %s", args.suite, f.name, "pass" if passed else "FAIL")
    payload = {
        "schema_version": 1,
        "suite": args.suite,
        "form": f.name,
        "precision": f.prec,
        "passed": passed,
        "results": results,
    }
    _emit_json(payload, args.json)
    return 0 if passed else 1


# ── CLI ───────────────────────────────────────────────────────────────────────
def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="halfweight")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="finalize a form into a coefficient file")
    b.add_argument("--form", required=True, help="delta, g, Delta, G11, E4 or a FormSpec string")
    b.add_argument("--prec", type=int, help=f"default {settings.DEFAULT_PREC}")
    b.add_argument("--huge", action="store_true", help="allow precision above the default")
    b.add_argument("--level", type=int, help="declared level of a FormSpec form")
    b.add_argument("--character", help="trivial:<N> or kronecker:<top>/mod:<N>")
    b.add_argument("--out", required=True)
    b.set_defaults(run=cmd_build)

    li = sub.add_parser("lift", help="Shimura lift at a square-free t")
    li.add_argument("--in", dest="input", required=True)
    li.add_argument("--t", type=int, required=True)
    li.add_argument("--out", required=True)
    li.set_defaults(run=cmd_lift)

    h = sub.add_parser("hecke", help="apply T(p^2), T(p) or U(p)")
    h.add_argument("--in", dest="input", required=True)
    h.add_argument("--op", choices=("tsq", "tp", "u"), required=True)
    h.add_argument("--p", type=int, required=True)
    h.add_argument("--out")
    h.add_argument("--verify-eigen", action="store_true")
    h.add_argument("--json", help="eigenvalue report path (default stdout)")
    h.set_defaults(run=cmd_hecke)

    s = sub.add_parser("signs", help="positive-coefficient ratios and sign changes")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--stats", default="tot,fund")
    s.add_argument("--X-list", dest="X_list")
    s.add_argument("--csv")
    s.add_argument("--t", type=int)
    s.add_argument("--powers-p", dest="powers_p", type=int)
    s.add_argument("--extend", type=int, help="continue a(tp^(2m)) to this m by recurrence")
    s.add_argument("--dprime", help="survey over square-free t with (t/p)=eps, e.g. 3:+1,5:-1")
    s.add_argument("--json", help="subsequence report path (default stdout)")
    s.set_defaults(run=cmd_signs)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--in", dest="input", required=True)
    v.add_argument("--suite", choices=tuple(SUITES), required=True)
    v.add_argument("--t", help="comma-separated t values (recurrence)")
    v.add_argument("--p", help="comma-separated primes (default 3,5,7)")
    v.add_argument("--X", type=int, help="search cutoff (prop2, twists)")
    v.add_argument("--json")
    v.set_defaults(run=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> None:
    args = build_parser().parse_args(argv)
    settings.configure_logging()
    try:
        code = args.run(args)
    except (UsageError, *INPUT_ERRORS) as e:
        print(f"❌ {e}", file=sys.stderr)
        sys.exit(2)
    if code:
        sys.exit(code)


if __name__ == "__main__":
    main()
