"""The coefficient sequence of the inverse of t - t^8 + t^15 and its positivity.

The inverse has the form t h(t^7) with h = sum a_n t^n. The a_n satisfy a
three-term recurrence s0(n) x_n - s1(n) x_(n-1) + s2(n) x_(n-2) = 0 whose
characteristic roots are rational; a second solution b_n (b_0 = 0, b_1 = 1)
dominates a_n and the ratio a_n / b_n telescopes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd

from .arith import (
    SturmChain,
    UniPoly,
    count_real_roots_above,
    quadratic_roots_exact,
)
from .linalg import nullspace_rational
from .series import TruncatedSeries, lagrange_invert


# -- the sequence a_n -----------------------------------------------------------------

def a_closed(n: int) -> Fraction:
    """(1/(7n+1)) sum_k (-1)^k C(7n+k, k) C(7n+1, n-3k)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    total = sum((-1) ** k * comb(7 * n + k, k) * comb(7 * n + 1, n - 3 * k) for k in range(n // 3 + 1))
    value = Fraction(total, 7 * n + 1)
    assert value.denominator == 1, f"a_{n} is not an integer"
    return value


@lru_cache(maxsize=8)
def _trinomial_inverse(order: int) -> TruncatedSeries:
    return lagrange_invert(TruncatedSeries.from_terms({1: 1, 8: -1, 15: 1}, order))


def a_from_inversion(n: int, budget: int = 5000) -> Fraction:
    """Coefficient of t^(7n+1) in the compositional inverse of t - t^8 + t^15."""
    order = 7 * n + 1
    if order > budget:
        raise ValueError(f"order {order} exceeds the inversion budget {budget}")
    # round the order up so nearby queries share one inversion
    return _trinomial_inverse(max(71, -(-order // 70) * 70 + 1))[order]


@dataclass
class SequenceTable:
    name: str
    values: dict[int, Fraction] = field(default_factory=dict)
    provenance: dict[int, str] = field(default_factory=dict)

    def __getitem__(self, k: int) -> Fraction:
        return self.values[k]

    def __contains__(self, k: int) -> bool:
        return k in self.values

    def set(self, k: int, v, how: str) -> None:
        self.values[k] = Fraction(v)
        self.provenance[k] = how

    def as_list(self) -> list[Fraction]:
        return [self.values[k] for k in range(max(self.values) + 1)]


def a_table(N: int) -> SequenceTable:
    s = SequenceTable("a")
    for k in range(N + 1):
        s.set(k, a_closed(k), "closed-form")
    return s


# -- recurrences ---------------------------------------------------------------------

@dataclass
class Recurrence:
    """sum_i (-1)^i s_i(n) x_(n-i) = 0, i = 0..order."""

    polys: tuple[UniPoly, ...]
    factored: tuple[str, ...] = ()

    def __post_init__(self):
        for p in self.polys:
            if any(c.denominator != 1 for c in p.coeffs):
                raise ValueError("recurrence coefficients must be integer polynomials")
        self._ints = tuple(tuple(int(c) for c in p.coeffs) for p in self.polys)

    @property
    def order(self) -> int:
        return len(self.polys) - 1

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(p.degree for p in self.polys)

    def leading(self) -> tuple[Fraction, ...]:
        return tuple(p.leading for p in self.polys)

    def s(self, i: int, n: int) -> int:
        acc = 0
        for c in reversed(self._ints[i]):
            acc = acc * n + c
        return acc

    def residual(self, x, n: int) -> Fraction:
        return sum((-1) ** i * self.s(i, n) * x[n - i] for i in range(self.order + 1))

    def extend(self, x: list, upto: int) -> list[Fraction]:
        """Continue a sequence given its first ``order`` terms."""
        out = [Fraction(v) for v in x]
        k = self.order
        for n in range(len(out), upto + 1):
            lead = self.s(0, n)
            if lead == 0:
                raise ZeroDivisionError(f"s0 vanishes at n={n}")
            rest = sum((-1) ** (i + 1) * self.s(i, n) * out[n - i] for i in range(1, k + 1))
            out.append(rest / lead)
        return out

    def as_dict(self) -> dict:
        return {
            "order": self.order,
            "degrees": list(self.degrees),
            "leading": [str(c) for c in self.leading()],
            "coefficients": [[str(c) for c in p.coeffs] for p in self.polys],
            "factored": list(self.factored),
        }


def _falling(a: int, b: int, count: int) -> UniPoly:
    """prod_{k=0}^{count-1} (a n + b - k)."""
    out = UniPoly.constant(1)
    for k in range(count):
        out = out * UniPoly([b - k, a])
    return out


S0_SEXTIC = (-1760658480, 4812446376, -3846578936, -658627050, 2527684225, -1295222226, 215870371)
S1_TRIDECIC = (
    1361946602938521600,
    -27319025166066426240,
    228076143949070673408,
    -1062333018859963548504,
    3092269284168816801572,
    -5912167336650049878706,
    7497470293244974003099,
    -6061259307194791053272,
    2596574853470043847011,
    123881005609280551032,
    -848711700458546819207,
    485734175892096120376,
    -126939777974315203483,
    13362081892033179314,
)
S2_SEXTIC = (-5085720, 73255350, -370521431, 817295010, -710371340, 0, 215870371)

# printed characteristic polynomial, for the transcription gate
CHI_PRINTED = (
    320194878522045287813073,
    11004249007610680591789502,
    94528316575149444580078125,
)
LAMBDA_MINUS = Fraction(30517578125, 1801088541)
LAMBDA_PLUS = Fraction(14348907, 823543)
RADIUS = Fraction(21**7, 5**15)
INITIAL_DECREMENT = Fraction(-77813, 276830)
C_PRINTED = Fraction(169452857, 10**7)


def three_term_recurrence(tamper: tuple[int, int, int] | None = None) -> Recurrence:
    """The order-2 recurrence for a_n, built from its factored form.

    ``tamper=(i, k, delta)`` adds delta to coefficient n^k of the non-product
    factor of s_i; used only for negative controls.
    """
    sextic0, tridecic1, sextic2 = list(S0_SEXTIC), list(S1_TRIDECIC), list(S2_SEXTIC)
    if tamper is not None:
        i, k, delta = tamper
        [sextic0, tridecic1, sextic2][i][k] += delta
    s0 = 2187 * _falling(7, 1, 14) * UniPoly(sextic0)
    s1 = _falling(7, -6, 7) * UniPoly(tridecic1)
    s2 = 15 * UniPoly([-14, 15]) * _falling(15, -16, 13) * UniPoly(sextic2)
    factored = (
        "2187 * prod_{k=0}^{13} (7n+1-k) * (" + _poly_text(sextic0) + ")",
        "prod_{k=0}^{6} (7n-6-k) * (" + _poly_text(tridecic1) + ")",
        "15 * (15n-14) * prod_{k=0}^{12} (15n-16-k) * (" + _poly_text(sextic2) + ")",
    )
    return Recurrence((s0, s1, s2), factored)


def _poly_text(coeffs) -> str:
    return str(UniPoly(coeffs)).replace("x", "n")


def residuals(r: Recurrence, x, lo: int, hi: int) -> dict[int, Fraction]:
    """Nonzero residuals of r on x over lo..hi."""
    out = {}
    for n in range(lo, hi + 1):
        v = r.residual(x, n)
        if v:
            out[n] = v
    return out


def residual_check(r: Recurrence, x, lo: int = 2, hi: int = 300) -> Fraction:
    """Largest |residual| over lo..hi; zero iff x satisfies r there."""
    return max((abs(v) for v in residuals(r, x, lo, hi).values()), default=Fraction(0))


def guess_recurrence(x, order: int, degree: int, margin: int = 10) -> Recurrence | None:
    """A recurrence of the given order and coefficient degree annihilating x, or None.

    Solves for the coefficients of s_0..s_order as the nullspace of the exact
    linear system; the first basis vector of the reduced echelon form is taken,
    cleared of denominators and content, with positive leading coefficient of s_0.
    """
    values = [Fraction(v) for v in x]
    unknowns = (order + 1) * (degree + 1)
    if len(values) - order < unknowns + margin:
        raise ValueError(f"need at least {unknowns + margin + order} terms, got {len(values)}")
    den = 1
    for v in values:
        den = den * v.denominator // gcd(den, v.denominator)
    ints = [int(v * den) for v in values]
    rows = []
    for n in range(order, len(values)):
        row = []
        for i in range(order + 1):
            xi = (-1) ** i * ints[n - i]
            row.extend(xi * n**j for j in range(degree + 1))
        rows.append(row)
    basis = nullspace_rational(rows, unknowns)
    if not basis:
        return None
    vec = basis[0]
    lcm = 1
    for v in vec:
        lcm = lcm * v.denominator // gcd(lcm, v.denominator)
    coeffs = [int(v * lcm) for v in vec]
    g = 0
    for c in coeffs:
        g = gcd(g, c)
    coeffs = [c // g for c in coeffs]
    polys = [UniPoly(coeffs[i * (degree + 1):(i + 1) * (degree + 1)]) for i in range(order + 1)]
    if polys[0].is_zero():
        return None
    if polys[0].leading < 0:
        polys = [-p for p in polys]
    return Recurrence(tuple(polys))


def recurrences_equivalent(r: Recurrence, q: Recurrence) -> bool:
    """Same order-k recurrence up to a polynomial factor: s_i^r s_0^q = s_0^r s_i^q for all i."""
    if r.order != q.order:
        return False
    return all(r.polys[i] * q.polys[0] == r.polys[0] * q.polys[i] for i in range(1, r.order + 1))


def characteristic_polynomial(r: Recurrence) -> UniPoly:
    """alpha_0 t^2 - alpha_1 t + alpha_2 from the leading coefficients."""
    if r.order != 2 or len(set(r.degrees)) != 1:
        raise ValueError("need an order-2 recurrence with coefficients of equal degree")
    a0, a1, a2 = r.leading()
    return UniPoly([a2, -a1, a0])


def char_roots(r: Recurrence) -> tuple[Fraction, Fraction]:
    chi = characteristic_polynomial(r)
    return quadratic_roots_exact(chi[2], chi[1], chi[0])


def radius_facts() -> dict:
    """Exact identities behind the radius of convergence of h."""
    t = UniPoly.x()
    t7 = t**7
    derivative = (1 - 8 * t7 + 15 * t**14)
    product = (1 - 3 * t7) * (1 - 5 * t7)
    f = t - t**8 + t**15
    critical = Fraction(21, 25) ** 7 / 5  # ((1 / 5^(1/7)) * 21/25)^7
    return {
        "derivative_matches": f.derivative() == derivative,
        "derivative_factorization": derivative == product,
        "critical_value_identity": critical == RADIUS,
        "radius": RADIUS,
        "radius_expanded": {"numerator": 21**7, "denominator": 5**15},
        "lambda_minus_times_radius": LAMBDA_MINUS * RADIUS,
        "lambda_minus_is_5^15/21^7": LAMBDA_MINUS == Fraction(5**15, 21**7),
        "lambda_plus_is_3^15/7^7": LAMBDA_PLUS == Fraction(3**15, 7**7),
    }


def b_table(N: int, recurrence: Recurrence | None = None) -> SequenceTable:
    r = recurrence or three_term_recurrence()
    vals = r.extend([0, 1], N)
    s = SequenceTable("b")
    for k, v in enumerate(vals):
        s.set(k, v, "initial" if k < 2 else "recurrence")
    return s


# -- the positivity certificate ------------------------------------------------------

@dataclass
class Step:
    index: str
    claim: str
    method: str
    status: str
    witness: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "index": self.index,
            "claim": self.claim,
            "method": self.method,
            "status": self.status,
            "witness": self.witness,
        }


@dataclass
class PositivityReport:
    terms: int
    steps: list[Step]
    universal_claim: str = "ASSUMED-ANALYTIC"

    @property
    def verdict(self) -> str:
        return "pass" if all(s.status == "pass" for s in self.steps) else "fail"

    @property
    def finitary_verdict(self) -> str:
        core = [s for s in self.steps if s.index != "9"]
        return "pass" if all(s.status == "pass" for s in core) else "fail"

    def step(self, index: str) -> Step:
        return next(s for s in self.steps if s.index == index)

    def first_failure(self) -> Step | None:
        return next((s for s in self.steps if s.status != "pass"), None)

    def as_dict(self) -> dict:
        return {
            "terms": self.terms,
            "verdict": self.verdict,
            "finitary_verdict": self.finitary_verdict,
            "universal_claim": self.universal_claim,
            "steps": [s.as_dict() for s in self.steps],
        }

    def render_text(self) -> str:
        lines = [f"positivity certificate, N = {self.terms}"]
        for s in self.steps:
            lines.append(f"  [{s.status.upper():4}] ({s.index}) {s.claim}  -- {s.method}")
        lines.append(f"  steps (0)-(8): {self.finitary_verdict}; all steps: {self.verdict}")
        lines.append(f"  a_n > 0 for every n: {self.universal_claim}")
        return "\n".join(lines) + "\n"


def _ok(flag: bool) -> str:
    return "pass" if flag else "fail"


def _bisect_sign_change(p: UniPoly, lo: Fraction, hi: Fraction, width: Fraction) -> tuple[Fraction, Fraction]:
    slo = p(lo) > 0
    while hi - lo > width:
        mid = (lo + hi) / 2
        if (p(mid) > 0) == slo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def positivity_certificate(N: int = 300, recurrence: Recurrence | None = None) -> PositivityReport:
    """Run every finitary step of the positivity argument for a_n exactly.

    Steps are recorded in proof order. Step 9 compares consecutive-term ratios at
    n = N with the characteristic roots and is only a diagnostic of the limit
    argument, which is not machine checked.
    """
    if N < 60:
        raise ValueError("need N >= 60")
    r = recurrence or three_term_recurrence()
    steps: list[Step] = []
    a = [a_closed(k) for k in range(N + 1)]

    # (0) transcription gates
    bad = residuals(r, a, 2, N)
    chi_ok = roots_ok = False
    chi_err = None
    try:
        chi = characteristic_polynomial(r)
        chi_ok = (int(chi[2]), int(-chi[1]), int(chi[0])) == CHI_PRINTED
        roots_ok = char_roots(r) == (LAMBDA_MINUS, LAMBDA_PLUS)
    except ValueError as exc:
        chi_err = str(exc)
    first_bad = min(bad) if bad else None
    steps.append(Step(
        "0", "recurrence annihilates a_n and reproduces the printed characteristic data",
        "exact residuals on 2..N; leading-coefficient comparison; exact quadratic roots",
        _ok(not bad and chi_ok and roots_ok),
        {"degrees": list(r.degrees), "first_nonzero_residual": first_bad,
         "residual_at_first": bad[first_bad] if bad else 0,
         "chi_matches": chi_ok, "roots_match": roots_ok, "error": chi_err},
    ))
    lam_minus, lam_plus = LAMBDA_MINUS, LAMBDA_PLUS

    try:
        b = r.extend([0, 1], max(N, 60))
    except ZeroDivisionError as exc:
        steps.append(Step("1", "b_n well defined", "recurrence", "fail", {"error": str(exc)}))
        return PositivityReport(N, steps)

    # (1)
    neg = [k for k in range(1, 50) if b[k] <= 0]
    steps.append(Step("1", "b_n > 0 for 0 < n < 50", "direct evaluation", _ok(not neg),
                      {"counterexample": neg[0] if neg else None}))

    # (2)
    C = b[50] / b[49]
    steps.append(Step(
        "2", "C = b_50/b_49 satisfies C > 16.944 > lambda_-",
        "exact rational comparison",
        _ok(C > Fraction(16944, 1000) > lam_minus and abs(C - C_PRINTED) < Fraction(1, 10**6)),
        {"C": C, "C_decimal": f"{float(C):.10f}", "lambda_minus": lam_minus},
    ))

    s0, s1, s2 = r.polys

    # (3)
    roots0 = count_real_roots_above(s0, 2) + (1 if s0(2) == 0 else 0)
    sample0 = [k for k in range(2, N + 1) if r.s(0, k) <= 0]
    steps.append(Step("3", "s0 has no real roots >= 2 and s0(n) > 0 for n >= 2",
                      "Descartes/Sturm count on [2, inf); evaluation on 2..N",
                      _ok(roots0 == 0 and not sample0),
                      {"roots_at_least_2": roots0, "nonpositive_at": sample0[:5]}))

    # (4)
    p, q = C.numerator, C.denominator
    Q = p * p * s0 - p * q * s1 + q * q * s2
    if Q.is_zero():
        steps.append(Step("4", "Q(n) < 0 for n >= 25", "Sturm", "fail", {"error": "Q vanishes"}))
    else:
        lead_negative = Q.leading < 0
        above = count_real_roots_above(Q, 25) + (1 if Q(25) == 0 else 0)
        window = count_real_roots_above(Q, 24) - count_real_roots_above(Q, 25)
        if window == 1 and Q(24) * Q(25) < 0:
            interval = _bisect_sign_change(Q, Fraction(24), Fraction(25), Fraction(1, 10**4))
        else:
            interval = SturmChain(Q).isolate_largest(24, 25, Fraction(1, 10**4))
        ratio_bad = [k for k in range(50, max(N, 60) + 1) if b[k] < C * b[k - 1]]
        steps.append(Step(
            "4", "Q(n) = C^2 s0 - C s1 + s2 < 0 for integers n >= 25; b_n/b_(n-1) >= C for 50 <= n <= max(N, 60)",
            "sign of leading coefficient; Descartes/Sturm root counts above 25 and in (24, 25]; exact ratio checks",
            _ok(lead_negative and above == 0 and window >= 1 and not ratio_bad),
            {"leading_negative": lead_negative, "roots_at_least_25": above, "roots_in_24_25": window,
             "largest_root_interval": list(interval) if interval else None,
             "ratio_counterexample": ratio_bad[0] if ratio_bad else None},
        ))

    # (5)
    roots2 = count_real_roots_above(s2, 2) + (1 if s2(2) == 0 else 0)
    sample2 = [k for k in range(3, N + 1) if r.s(2, k) <= 0]
    steps.append(Step("5", "s2 has no real roots >= 2 and s2(n) > 0 for n >= 3",
                      "Descartes/Sturm count on [2, inf); evaluation on 3..N",
                      _ok(roots2 == 0 and not sample2),
                      {"roots_at_least_2": roots2, "nonpositive_at": sample2[:5]}))

    # (6)
    dec = a[2] / b[2] - a[1] / b[1]
    steps.append(Step("6", "a_2/b_2 - a_1/b_1 = -77813/276830", "exact arithmetic",
                      _ok(dec == INITIAL_DECREMENT), {"value": dec}))

    # (7)
    ratio = [None] + [a[k] / b[k] for k in range(1, N + 1)]
    tele_bad = []
    for k in range(3, N + 1):
        lhs = ratio[k] - ratio[k - 1]
        rhs = Fraction(r.s(2, k) * b[k - 2], r.s(0, k)) / b[k] * (ratio[k - 1] - ratio[k - 2])
        if lhs != rhs:
            tele_bad.append(k)
            break
    mono_bad = [k for k in range(2, N + 1) if not ratio[k] < ratio[k - 1]]
    pos_bad = [k for k in range(1, N + 1) if ratio[k] <= 0]
    steps.append(Step(
        "7", "telescoping identity holds; a_n/b_n is positive and strictly decreasing on 1..N",
        "exact arithmetic", _ok(not tele_bad and not mono_bad and not pos_bad),
        {"telescoping_counterexample": tele_bad[0] if tele_bad else None,
         "monotonicity_counterexample": mono_bad[0] if mono_bad else None,
         "positivity_counterexample": pos_bad[0] if pos_bad else None,
         "ratio_at_N_decimal": f"{float(ratio[N]):.6e}"},
    ))

    # (8)
    a_bad = [k for k in range(1, N + 1) if a[k] <= 0]
    steps.append(Step("8", "a_n > 0 for 1 <= n <= N", "exact integers",
                      _ok(not a_bad), {"counterexample": a_bad[0] if a_bad else None}))

    # (9)
    tol = Fraction(1, 100)
    ra, rb = a[N] / a[N - 1], b[N] / b[N - 1]
    da, db = ra - lam_minus, rb - lam_plus
    # first-order extrapolation n r_n - (n-1) r_(n-1), reported only as context
    ea = N * ra - (N - 1) * (a[N - 1] / a[N - 2])
    eb = N * rb - (N - 1) * (b[N - 1] / b[N - 2])
    steps.append(Step(
        "9", "|a_N/a_(N-1) - lambda_-| < 1/100 and |b_N/b_(N-1) - lambda_+| < 1/100",
        "exact ratios compared with the characteristic roots",
        _ok(abs(da) < tol and abs(db) < tol),
        {"a_ratio_minus_lambda": f"{float(da):.6f}", "b_ratio_minus_lambda": f"{float(db):.6f}",
         "a_extrapolated_minus_lambda": f"{float(ea - lam_minus):.6f}",
         "b_extrapolated_minus_lambda": f"{float(eb - lam_plus):.6f}"},
    ))
    return PositivityReport(N, steps)
