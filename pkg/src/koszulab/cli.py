"""Command-line front end. Exit codes: 0 all checks pass, 1 a check failed, 2 usage or resource error."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from pathlib import Path

from . import __version__
from .arith import DEFAULT_PRIMES, is_prime
from .cobar import (
    boundary_preimage_monomials,
    cycle_cn,
    differential,
    is_boundary,
    verify_boundary_formula,
    whistle_blower,
)
from .dims import build_consequence_matrix, poincare_series
from .hypergeom import (
    LAMBDA_MINUS,
    LAMBDA_PLUS,
    a_closed,
    char_roots,
    guess_recurrence,
    positivity_certificate,
    radius_facts,
    recurrences_equivalent,
    residuals,
    three_term_recurrence,
)
from .series import (
    TruncatedSeries,
    compose,
    detect_gap,
    format_series,
    lagrange_invert,
    minimal_model_generators,
    newton_invert,
    parse_series_text,
    read_series,
    scan_negative,
)
from .suite import PROFILES, first_negative_weight, run_suite
from .trees import BudgetExceeded

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class CommandPlan:
    command: str
    params: dict
    fmt: str = "text"
    out: str | None = None


@dataclass
class RunReport:
    command: str
    inputs: dict
    checks: list[dict] = field(default_factory=list)
    result: dict = field(default_factory=dict)
    table: list[tuple] | None = None
    summary: list[str] = field(default_factory=list)

    def add(self, name: str, passed: bool, detail=None, where: str = "", counterexample=None) -> None:
        entry = {"name": name, "status": "pass" if passed else "fail", "detail": detail, "where": where}
        if not passed:
            if counterexample is None and detail is not None:
                counterexample = json.dumps(_jsonable(detail), sort_keys=True)
            entry["counterexample"] = counterexample
        self.checks.append(entry)

    @property
    def passed(self) -> bool:
        return all(c["status"] == "pass" for c in self.checks)

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.passed else EXIT_FAIL

    def as_dict(self) -> dict:
        return {
            "tool": "koszulab",
            "version": __version__,
            "command": self.command,
            "inputs": self.inputs,
            "checks": self.checks,
            "result": self.result,
            "status": "pass" if self.passed else "fail",
        }


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    return str(x)


def render(report: RunReport, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_jsonable(report.as_dict()), sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if report.table is not None:
            w.writerows(report.table)
        else:
            w.writerow(("check", "status"))
            for c in report.checks:
                w.writerow((c["name"], c["status"]))
        return buf.getvalue()
    lines = [f"koszulab {__version__}: {report.command}"]
    for k, v in sorted(report.inputs.items()):
        lines.append(f"  {k} = {_jsonable(v)}")
    for c in report.checks:
        lines.append(f"[{c['status'].upper()}] {c['name']}")
        if c["status"] != "pass":
            where = f"{c['where']}: " if c.get("where") else ""
            lines.append(f"    {where}{c.get('counterexample')}")
    lines.extend(report.summary)
    lines.append("status: " + ("pass" if report.passed else "fail"))
    return "\n".join(lines) + "\n"


# -- argument parsing ----------------------------------------------------------------

def _n_value(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--n expects an integer, got {text!r}") from None
    if n < 2:
        raise argparse.ArgumentTypeError(f"--n must be at least 2, got {n}")
    return n


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _primes(text: str) -> tuple[int, ...]:
    try:
        ps = tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"--primes expects comma-separated integers, got {text!r}") from None
    bad = [p for p in ps if not is_prime(p)]
    if not ps or bad:
        raise argparse.ArgumentTypeError(f"--primes: not prime: {bad}")
    return ps


def _tamper(text: str) -> tuple[int, int, int]:
    try:
        i, k, d = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("--tamper expects i,k,delta") from None
    if i not in (0, 1, 2):
        raise argparse.ArgumentTypeError("--tamper: i must be 0, 1 or 2")
    return i, k, d


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text", "csv"), default="text")
    common.add_argument("--out", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="koszulab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-boundary", parents=[common], help="check d(nu) = n! mu^(n+1)")
    p.add_argument("--n", type=_n_value, required=True)
    p.add_argument("--budget", type=_positive)

    p = sub.add_parser("cycle", parents=[common], help="build c_n, check it is closed, find its whistle-blower")
    p.add_argument("--n", type=_n_value, required=True)
    p.add_argument("--check-nonboundary", action="store_true", help="solve d(x) = c_n exactly")
    p.add_argument("--budget", type=_positive)

    p = sub.add_parser("invert", parents=[common], help="compositional inverse of a series")
    p.add_argument("--coeffs", required=True,
                   help="comma-separated coefficients from t^0, 'exp:coef' pairs, or a series file")
    p.add_argument("--order", type=_positive, required=True)
    p.add_argument("--method", choices=("lagrange", "newton", "both"), default="both")

    p = sub.add_parser("gap", parents=[common], help="generator series and gap of a Poincare series")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--gp-file")
    src.add_argument("--gp", help="inline series, same syntax as invert --coeffs")
    p.add_argument("--n", type=_n_value, required=True)

    p = sub.add_parser("scan-negative", parents=[common], help="first negative coefficient of an inverse series")
    p.add_argument("--n", type=_n_value, help="use the inverse of t - t^n + t^(2n-1)")
    p.add_argument("--terms", type=_positive, default=400,
                   help="number of structurally nonzero coefficients to scan (with --n)")
    p.add_argument("--coeffs", help="scan this series instead")
    p.add_argument("--expect", choices=("none", "found"))

    p = sub.add_parser("poincare", parents=[common], help="dimensions by sparse rank")
    p.add_argument("--n", type=_n_value, required=True)
    p.add_argument("--max-weight", type=_positive, required=True)
    p.add_argument("--primes", type=_primes, default=DEFAULT_PRIMES)
    p.add_argument("--exact-upto", type=int, default=3)
    p.add_argument("--column-budget", type=_positive)
    p.add_argument("--export-matrix", metavar="PREFIX",
                   help="write each consequence matrix to PREFIX<w>.txt as 'row col value' lines")

    p = sub.add_parser("recurrence", parents=[common], help="check or re-derive the three-term recurrence")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--verify", action="store_true")
    mode.add_argument("--guess", action="store_true")
    p.add_argument("--order", type=_positive, default=2)
    p.add_argument("--degree", type=int, default=20)
    p.add_argument("--terms", type=_positive, default=300)
    p.add_argument("--tamper", type=_tamper, help=argparse.SUPPRESS)

    sub.add_parser("radius", parents=[common], help="exact facts behind the radius of convergence")

    p = sub.add_parser("positivity", parents=[common], help="run the positivity certificate")
    p.add_argument("--terms", type=_positive, default=300)
    p.add_argument("--tamper", type=_tamper, help=argparse.SUPPRESS)

    p = sub.add_parser("run-all", parents=[common], help="the whole verification suite")
    p.add_argument("profile", choices=PROFILES)
    p.add_argument("--tamper", type=_tamper, help=argparse.SUPPRESS)
    return parser


def _series_arg(text: str, order: int | None = None) -> TruncatedSeries:
    path = Path(text)
    if path.is_file():
        return read_series(path, order)
    items = [s.strip() for s in text.split(",") if s.strip()]
    if not items:
        raise UsageError("empty series")
    try:
        if any(":" in s for s in items):
            body = "\n".join(s.replace(":", " ") for s in items)
            return parse_series_text(body, order)
        return TruncatedSeries([Fraction(s) for s in items], order)
    except ValueError as exc:
        raise UsageError(f"malformed series {text!r}: {exc}") from None


def parse(argv: list[str]) -> CommandPlan:
    ns = build_parser().parse_args(argv)
    params = {k: v for k, v in vars(ns).items() if k not in ("command", "format", "out")}
    if ns.command == "poincare" and ns.exact_upto < 0:
        raise UsageError("--exact-upto must be non-negative")
    if ns.command == "scan-negative" and (ns.n is None) == (ns.coeffs is None):
        raise UsageError("scan-negative needs exactly one of --n or --coeffs")
    if ns.command == "positivity" and ns.terms < 60:
        raise UsageError("--terms must be at least 60")
    return CommandPlan(ns.command, params, ns.format, ns.out)


# -- commands -------------------------------------------------------------------------

def _exponent_text(e) -> str:
    return "none" if e is None else f"t^{e}"


def _verify_boundary(p) -> RunReport:
    rep = verify_boundary_formula(p["n"], p.get("budget"))
    r = RunReport("verify-boundary", {"n": p["n"]})
    where = "cobar.verify_boundary_formula"
    r.add("boundary-formula", rep.status == "pass", rep.first_mismatch, where)
    r.add("no-singular-edges-only-comb", rep.b1_is_comb, None, where, "B1 differs from the comb")
    r.add("no-zero-tree-without-regular-edges", rep.b0_empty, None, where, "B0 is nonzero")
    r.add("edge-cancellation", rep.cancellation_ok, rep.first_mismatch, "cobar.zero_tree_cancellation")
    r.result = rep.as_dict()
    r.summary = [
        f"nu has {rep.nu_terms} terms; d(nu) has {rep.lhs_terms} term(s)",
        f"coefficient of mu^({p['n'] + 1}) in d(nu): {rep.lhs_coefficient_on_comb} (expected {rep.rhs_coefficient})",
    ]
    return r


def _cycle(p) -> RunReport:
    n = p["n"]
    c = cycle_cn(n, p.get("budget"))
    w = whistle_blower(n)
    r = RunReport("cycle", {"n": n, "check_nonboundary": p["check_nonboundary"]})
    dc = differential(c)
    first = None if dc.is_zero() else f"{len(dc)} terms survive, e.g. {next(iter(sorted(dc.monomials())))}"
    r.add("closed", dc.is_zero(), None, "cobar.differential", first)
    expected = (-1) ** (n + 1) * factorial(n - 1)
    coeff = c.coefficient(w.code)
    r.add("whistle-blower-coefficient", coeff == expected, {"got": coeff, "expected": expected}, "cobar.cycle_cn")
    pre = boundary_preimage_monomials(w)
    r.add("whistle-blower-has-no-preimage", not pre, [str(t) for t in pre], "cobar.boundary_preimage_monomials")
    r.result = {"terms": len(c), "whistle_blower": str(w), "coefficient": coeff}
    r.summary = [f"c_{n} has {len(c)} terms; whistle-blower {w} has coefficient {coeff}"]
    if p["check_nonboundary"]:
        q = is_boundary(c, p.get("budget"))
        r.add("not-a-boundary", not q.solvable, q.certificate(), "cobar.is_boundary",
              "d(x) = c_n is solvable" if q.solvable else None)
        r.result["certificate"] = q.certificate()
        r.summary.append(
            f"d(x) = c_{n} over {len(q.basis)} degree-2 monomials: rank {q.rank}, "
            f"augmented rank {q.rank_augmented} ({'solvable' if q.solvable else 'infeasible'})"
        )
    return r


def _invert(p) -> RunReport:
    f = _series_arg(p["coeffs"], p["order"])
    r = RunReport("invert", {"coeffs": p["coeffs"], "order": p["order"], "method": p["method"]})
    results = {}
    if p["method"] in ("lagrange", "both"):
        results["lagrange"] = lagrange_invert(f)
    if p["method"] in ("newton", "both"):
        results["newton"] = newton_invert(f)
    inv = next(iter(results.values()))
    if len(results) == 2:
        diff = results["lagrange"] - results["newton"]
        r.add("lagrange-equals-newton", diff.valuation() is None, None, "series.newton_invert",
              f"coefficients differ first at t^{diff.valuation()}")
    resid = compose(f, inv) - TruncatedSeries.t(inv.order)
    r.add("compose-gives-t", resid.valuation() is None, None, "series.compose",
          f"f(g(t)) - t has a term at t^{resid.valuation()}")
    r.summary = [f"inverse: {format_series(inv)} + O(t^{inv.order + 1})",
                 f"first negative coefficient: {_exponent_text(scan_negative(inv))}"]
    r.result = {"inverse": {str(e): c for e, c in inv.terms().items()},
                "first_negative": scan_negative(inv)}
    r.table = [("exponent", "coefficient")] + [(e, str(c)) for e, c in inv.terms().items()]
    return r


def _gap(p) -> RunReport:
    n = p["n"]
    if p.get("gp_file"):
        try:
            gP = read_series(p["gp_file"])
        except (OSError, ValueError) as exc:
            raise UsageError(f"--gp-file: {exc}") from None
    else:
        gP = _series_arg(p["gp"])
    gE = minimal_model_generators(gP)
    try:
        rep = detect_gap(gE, n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    r = RunReport("gap", {"n": n, "source": p.get("gp_file") or p.get("gp")})
    r.result = {"generators": {str(e): c for e, c in gE.terms().items()}, "gap": rep.as_dict()}
    r.summary = [f"generators: {format_series(gE)} + O(t^{gE.order + 1})"]
    if rep.has_gap:
        run = f"{rep.d} weight(s)" + (" (reaching the truncation order)" if rep.truncated else "")
        r.summary.append(f"gap starts at weight {rep.q} (t^{rep.q * (n - 1) + 1}) and spans {run}")
    else:
        r.summary.append("no gap within the truncation order")
    r.table = [("weight", "coefficient", "abs")] + [(w, str(c), str(abs(c))) for w, c in rep.by_weight.items()]
    return r


def _scan_negative(p) -> RunReport:
    r = RunReport("scan-negative", {k: p.get(k) for k in ("n", "terms", "coeffs")})
    if p.get("n") is not None:
        weight, exponent = first_negative_weight(p["n"], p["terms"])
        r.result = {"first_negative_exponent": exponent, "first_negative_weight": weight}
    else:
        f = _series_arg(p["coeffs"])
        exponent = scan_negative(f)
        r.result = {"first_negative_exponent": exponent}
    if p.get("expect"):
        r.add(f"expect-{p['expect']}", (exponent is None) == (p["expect"] == "none"), None,
              "series.scan_negative", f"first negative: {_exponent_text(exponent)}")
    r.summary = [f"first negative coefficient: {_exponent_text(exponent)}"]
    return r


def _poincare(p) -> RunReport:
    ds = poincare_series(p["n"], p["max_weight"], p["primes"], p["exact_upto"], p.get("column_budget"))
    r = RunReport("poincare", {"n": p["n"], "max_weight": p["max_weight"], "primes": list(p["primes"]),
                               "exact_upto": p["exact_upto"]})
    r.add("ranks-agree-across-primes", not ds.flagged,
          [rec.as_dict() for rec in ds.records if not rec.agree] or None, "dims.rank_mod_p")
    if p["n"] == 8:
        mism = [w for w in range(2, p["max_weight"] + 1) if a_closed(w) != ds.dims()[w]]
        r.add("closed-form-agrees", not mism, None, "hypergeom.a_closed",
              f"weight {mism[0]}: closed form {a_closed(mism[0])}, rank gives {ds.dims()[mism[0]]}" if mism else None)
    if p.get("export_matrix"):
        for w in range(2, p["max_weight"] + 1):
            build_consequence_matrix(p["n"], w, p.get("column_budget")).write_triplets(f"{p['export_matrix']}{w}.txt")
    r.result = ds.as_dict()
    r.summary = [f"series: {format_series(ds.series())} + O(t^{ds.series().order + 1})"] + [
        f"  weight {rec.weight}: free {rec.free}, consequences {rec.consequences}, "
        f"ranks {sorted(set(rec.ranks.values()))}, dim {rec.dim}" for rec in ds.records
    ]
    r.table = [("weight", "exponent", "free", "consequences", "dim")] + [
        (rec.weight, rec.weight * (p["n"] - 1) + 1, rec.free, rec.consequences, rec.dim) for rec in ds.records
    ]
    return r


def _recurrence(p) -> RunReport:
    N = p["terms"]
    rec = three_term_recurrence(p.get("tamper"))
    a = [a_closed(k) for k in range(N + 1)]
    r = RunReport("recurrence", {"terms": N, "mode": "verify" if p["verify"] else "guess",
                                 "order": p["order"], "degree": p["degree"]})
    if p["verify"]:
        bad = residuals(rec, a, 2, N)
        first = min(bad) if bad else None
        r.add("residual-zero", not bad, None, "hypergeom.residual_check",
              f"residual {bad[first]} at n={first}" if bad else None)
        r.result = {"recurrence": rec.as_dict()}
        r.summary = [f"coefficient degrees {list(rec.degrees)}; residual zero on 2..{N}: {not bad}"]
        try:
            roots = char_roots(rec)
            ok = roots == (LAMBDA_MINUS, LAMBDA_PLUS)
            r.add("characteristic-roots", ok, None, "hypergeom.char_roots", f"roots {roots[0]}, {roots[1]}")
            r.result["roots"] = list(roots)
            r.summary.append(f"characteristic roots {roots[0]} and {roots[1]}")
        except ValueError as exc:
            r.add("characteristic-roots", False, None, "hypergeom.char_roots", str(exc))
        return r
    need = (p["order"] + 1) * (p["degree"] + 1) + 10 + p["order"]
    g = guess_recurrence(a[: max(need, 40)], p["order"], p["degree"])
    r.add("recurrence-found", g is not None, None, "hypergeom.guess_recurrence",
          f"no recurrence of order {p['order']} and degree {p['degree']}")
    if g is not None:
        bad = residuals(g, a, p["order"], N)
        r.add("guess-annihilates-all-terms", not bad, None, "hypergeom.residual_check",
              f"nonzero residual at n={min(bad)}" if bad else None)
        if p["order"] == 2:
            r.add("equivalent-to-embedded", recurrences_equivalent(g, rec), None,
                  "hypergeom.recurrences_equivalent", "cross-multiplied coefficients differ")
        r.result = {"recurrence": g.as_dict()}
        r.summary = [f"found order {g.order}, coefficient degrees {list(g.degrees)}, "
                     f"leading coefficients {[str(c) for c in g.leading()]}"]
    return r


def _radius(p) -> RunReport:
    facts = radius_facts()
    r = RunReport("radius", {})
    for k in ("derivative_matches", "derivative_factorization", "critical_value_identity",
              "lambda_minus_is_5^15/21^7", "lambda_plus_is_3^15/7^7"):
        r.add(k, facts[k], None, "hypergeom.radius_facts", "identity does not hold")
    r.add("lambda_minus_times_radius_is_1", facts["lambda_minus_times_radius"] == 1, None,
          "hypergeom.radius_facts", f"product is {facts['lambda_minus_times_radius']}")
    r.result = facts
    r.summary = [f"radius of convergence: {facts['radius']} = 21^7/5^15"]
    return r


def _positivity(p) -> RunReport:
    rec = three_term_recurrence(p["tamper"]) if p.get("tamper") else None
    rep = positivity_certificate(p["terms"], rec)
    r = RunReport("positivity", {"terms": p["terms"], "tampered": p.get("tamper") is not None})
    for s in rep.steps:
        r.add(f"step-{s.index}", s.status == "pass", s.witness if s.status != "pass" else None,
              "hypergeom.positivity_certificate")
    r.result = {"certificate": rep.as_dict()}
    r.summary = rep.render_text().rstrip("\n").split("\n")
    return r


def run_all(profile: str, tamper=None) -> RunReport:
    r = RunReport("run-all", {"profile": profile, "tampered": tamper is not None})
    for c in run_suite(profile, tamper):
        r.add(c.name, c.passed, None, c.where, c.counterexample)
        r.result[c.name] = c.detail
        r.summary.append(f"  {c.name}: {c.status} ({c.seconds:.1f}s)")
    return r


def _run_all(p) -> RunReport:
    return run_all(p["profile"], p.get("tamper"))


COMMANDS = {
    "verify-boundary": _verify_boundary,
    "cycle": _cycle,
    "invert": _invert,
    "gap": _gap,
    "scan-negative": _scan_negative,
    "poincare": _poincare,
    "recurrence": _recurrence,
    "radius": _radius,
    "positivity": _positivity,
    "run-all": _run_all,
}


def execute(plan: CommandPlan) -> tuple[RunReport, int]:
    report = COMMANDS[plan.command](plan.params)
    return report, report.exit_code


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        plan = parse(argv)
    except SystemExit as exc:  # argparse already printed the message
        return EXIT_USAGE if exc.code else EXIT_OK
    except UsageError as exc:
        print(f"koszulab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report, code = execute(plan)
    except UsageError as exc:
        print(f"koszulab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"koszulab: resource budget exceeded: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ZeroDivisionError) as exc:
        print(f"koszulab: error in {plan.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(report, plan.fmt)
    if plan.out:
        Path(plan.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
