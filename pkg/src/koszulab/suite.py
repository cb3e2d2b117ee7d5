"""The verification suite behind ``run-all``: one entry per headline claim."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from math import factorial

from .arith import DEFAULT_PRIMES
from .cobar import (
    boundary_preimage_monomials,
    cycle_cn,
    differential,
    is_boundary,
    verify_boundary_formula,
    whistle_blower,
)
from .dims import DimensionSeries, poincare_series
from .hypergeom import (
    a_closed,
    char_roots,
    guess_recurrence,
    positivity_certificate,
    recurrences_equivalent,
    residual_check,
    residuals,
    three_term_recurrence,
)
from .series import detect_gap, inverse_of_trinomial, minimal_model_generators, scan_negative
from .trees import epsilon, from_nested, nu

PROFILES = ("quick", "full")

# the five 1-trees for n = 2 with their expected epsilon values
N2_ONE_TREES = (
    ("x(,m(,),)", -1),
    ("x(m(,),,)", -1),
    ("x(,,m(,))", 1),
    ("m(x(,,),)", 1),
    ("m(,x(,,))", 1),
)

N8_DIMENSIONS = (1, 1, 7, 69, 790, 9842)


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0
    where: str = ""
    counterexample: str | None = None

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def as_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "detail": self.detail}


def _timed(name, where, fn, *args) -> Check:
    t = time.perf_counter()
    passed, detail = fn(*args)
    check = Check(name, passed, detail, time.perf_counter() - t, where)
    if not passed:
        check.counterexample = first_counterexample(name, detail)
    return check


def first_counterexample(name: str, detail: dict) -> str:
    """A one-line description of the first failing item in a check's detail."""
    if name == "positivity":
        steps = detail["certificate"]["steps"]
        bad = next((s for s in steps if s["status"] != "pass"), None)
        if detail.get("first_negative_through_t350") is not None:
            return f"negative coefficient at t^{detail['first_negative_through_t350']}"
        if bad is not None:
            witness = json.dumps(bad["witness"], sort_keys=True, default=str)
            return f"step {bad['index']} ({bad['claim']}): {witness}"
    if name == "boundary-formula" or name == "edge-cancellation":
        for n, rep in detail.items():
            if isinstance(rep, dict) and rep.get("first_mismatch"):
                return f"n={n}: {rep['first_mismatch']}"
    if name == "recurrence":
        return ", ".join(f"{k}={v}" for k, v in detail.items())
    text = json.dumps(detail, sort_keys=True, default=str)
    return text if len(text) <= 300 else text[:297] + "..."


def check_boundary_formula(ns) -> tuple[bool, dict]:
    detail = {}
    ok = True
    for n in ns:
        rep = verify_boundary_formula(n)
        detail[str(n)] = rep.as_dict()
        ok &= rep.status == "pass"
    v = nu(2)
    example = {}
    for text, eps in N2_ONE_TREES:
        T = from_nested(text, 2)
        example[text] = {"epsilon": epsilon(T), "expected": eps, "in_nu": v.coefficient(T.code)}
        ok &= epsilon(T) == eps == v.coefficient(T.code)
    ok &= len(v) == len(N2_ONE_TREES)
    detail["n2_example"] = example
    return ok, detail


def check_cancellation(ns) -> tuple[bool, dict]:
    detail = {}
    ok = True
    for n in ns:
        rep = verify_boundary_formula(n)
        detail[str(n)] = {
            "cancellation_ok": rep.cancellation_ok,
            "b1_is_comb": rep.b1_is_comb,
            "b0_empty": rep.b0_empty,
            "first_mismatch": rep.first_mismatch,
        }
        ok &= rep.cancellation_ok and rep.b1_is_comb and rep.b0_empty
    return ok, detail


def check_cycle(cycle_ns, boundary_ns, whistle_ns) -> tuple[bool, dict]:
    ok = True
    detail: dict = {"cycle": {}, "nonboundary": {}, "preimages": {}}
    for n in cycle_ns:
        c = cycle_cn(n)
        w = whistle_blower(n)
        coeff = c.coefficient(w.code)
        expected = (-1) ** (n + 1) * factorial(n - 1)
        closed = differential(c).is_zero()
        detail["cycle"][str(n)] = {"terms": len(c), "closed": closed,
                                   "whistle_coefficient": coeff, "expected": expected}
        ok &= closed and coeff == expected
    for n in boundary_ns:
        q = is_boundary(cycle_cn(n))
        detail["nonboundary"][str(n)] = q.certificate()
        ok &= not q.solvable and q.rank_augmented == q.rank + 1
    for n in whistle_ns:
        pre = boundary_preimage_monomials(whistle_blower(n))
        detail["preimages"][str(n)] = [str(t) for t in pre]
        ok &= not pre
    return ok, detail


def check_dimensions(ds: DimensionSeries) -> tuple[bool, dict]:
    expected = list(N8_DIMENSIONS[: len(ds.records)])
    ok = ds.n == 8 and ds.dims() == expected and not ds.flagged
    return ok, {"dims": ds.dims(), "expected": expected, "report": ds.as_dict()}


def check_cross_oracle(ds: DimensionSeries, weights) -> tuple[bool, dict]:
    dims = ds.dims()
    pairs = {str(w): {"closed_form": a_closed(w), "rank": dims[w]} for w in weights}
    ok = all(a_closed(w) == dims[w] for w in weights)
    return ok, pairs


def check_gap(ds: DimensionSeries) -> tuple[bool, dict]:
    gE = minimal_model_generators(ds.series())
    rep = detect_gap(gE, ds.n)
    zeros = [e for e in (22, 29, 36) if e <= gE.order]
    ok = (
        all(gE[e] == 0 for e in zeros)
        and all(gE[e] != 0 for e in (8, 15))
        and rep.q == 3
    )
    return ok, {"generators": {str(e): c for e, c in gE.terms().items()},
                "checked_zero_exponents": zeros, "gap": rep.as_dict()}


def check_positivity(N: int, tamper=None) -> tuple[bool, dict]:
    neg = scan_negative(inverse_of_trinomial(8, 350))
    r = three_term_recurrence(tamper) if tamper else None
    rep = positivity_certificate(N, r)
    ok = neg is None and rep.verdict == "pass"
    return ok, {"first_negative_through_t350": neg, "certificate": rep.as_dict()}


def check_recurrence(N: int, tamper=None) -> tuple[bool, dict]:
    r = three_term_recurrence(tamper)
    a = [a_closed(k) for k in range(N + 1)]
    resid = residual_check(r, a, 2, N)
    guessed = guess_recurrence(a[:100], 2, 20)
    equivalent = guessed is not None and recurrences_equivalent(guessed, three_term_recurrence())
    roots_same = guessed is not None and char_roots(guessed) == char_roots(three_term_recurrence())
    # negative control: one perturbed term must be caught at exactly three indices
    bumped = list(a)
    bumped[10] += 1
    caught = sorted(residuals(three_term_recurrence(), bumped, 2, N))
    ok = resid == 0 and equivalent and roots_same and caught == [10, 11, 12]
    return ok, {"max_residual": resid, "guessed_equivalent": equivalent,
                "guessed_roots_match": roots_same, "perturbation_caught_at": caught}


def first_negative_weight(n: int, terms: int) -> tuple[int | None, int | None]:
    """First negative coefficient of the inverse of t - t^n + t^(2n-1) among its
    first ``terms`` structurally nonzero coefficients (exponents p(n-1)+1).

    Returns (weight p, exponent) or (None, None).
    """
    order = (terms - 1) * (n - 1) + 1
    idx = scan_negative(inverse_of_trinomial(n, order))
    if idx is None:
        return None, None
    return (idx - 1) // (n - 1), idx


def check_contrast(terms_small: int = 400, terms_eight: int = 350) -> tuple[bool, dict]:
    found = {}
    for n in range(2, 8):
        w, e = first_negative_weight(n, terms_small)
        found[str(n)] = {"weight": w, "exponent": e}
    w8, e8 = first_negative_weight(8, terms_eight)
    found["8"] = {"weight": w8, "exponent": e8}
    ok = e8 is None and all(found[str(n)]["exponent"] is not None for n in range(2, 8))
    return ok, {"first_negative": found, "terms": {"n<=7": terms_small, "n=8": terms_eight}}


def run_suite(profile: str = "quick", tamper=None) -> list[Check]:
    """Run every check; ``tamper`` perturbs the embedded recurrence (negative control)."""
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}")
    full = profile == "full"
    N = 300
    t = time.perf_counter()
    ds = poincare_series(8, 5 if full else 4, DEFAULT_PRIMES)
    rank_seconds = time.perf_counter() - t
    weights = tuple(range(2, len(ds.records)))
    boundary_ns = (2, 3, 4, 5) if full else (2, 3, 4)
    checks = [
        _timed("boundary-formula", "cobar.verify_boundary_formula", check_boundary_formula, boundary_ns),
        _timed("edge-cancellation", "cobar.zero_tree_cancellation", check_cancellation, (2, 3, 4)),
        _timed("cycle-nonboundary", "cobar.is_boundary", check_cycle, (2, 3, 4), (2, 3), (2, 3, 4, 5)),
        _timed("dimensions", "dims.poincare_series", check_dimensions, ds),
        _timed("closed-form-vs-rank", "hypergeom.a_closed", check_cross_oracle, ds, weights),
        _timed("gap", "series.detect_gap", check_gap, ds),
        _timed("positivity", "hypergeom.positivity_certificate", check_positivity, N, tamper),
        _timed("recurrence", "hypergeom.residual_check", check_recurrence, N, tamper),
        _timed("contrast", "series.scan_negative", check_contrast),
    ]
    checks[3].seconds += rank_seconds
    return checks
