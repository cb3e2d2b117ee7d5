"""Truncated formal power series with exact rational coefficients."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from pathlib import Path
from typing import Iterable, Mapping

from .arith import as_fraction


class TruncatedSeries:
    """c_0 + c_1 t + ... + c_N t^N, known modulo t^(N+1)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable, order: int | None = None):
        cs = [as_fraction(c) for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise ValueError("order must be non-negative")
        cs = cs[: order + 1] + [Fraction(0)] * (order + 1 - len(cs))
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def from_terms(cls, terms: Mapping[int, object], order: int) -> TruncatedSeries:
        cs = [Fraction(0)] * (order + 1)
        for e, c in terms.items():
            if e < 0:
                raise ValueError("negative exponent")
            if e <= order:
                cs[e] = as_fraction(c)
        return cls(cs, order)

    @classmethod
    def t(cls, order: int) -> TruncatedSeries:
        return cls.from_terms({1: 1}, order)

    @classmethod
    def zero(cls, order: int) -> TruncatedSeries:
        return cls([], order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def terms(self) -> dict[int, Fraction]:
        return {e: c for e, c in enumerate(self.coeffs) if c}

    def valuation(self) -> int | None:
        for e, c in enumerate(self.coeffs):
            if c:
                return e
        return None

    def truncate(self, order: int) -> TruncatedSeries:
        return TruncatedSeries(self.coeffs, min(order, self.order))

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"TruncatedSeries({format_series(self)}, order={self.order})"

    def __add__(self, other: TruncatedSeries) -> TruncatedSeries:
        N = min(self.order, other.order)
        return TruncatedSeries([self[k] + other[k] for k in range(N + 1)], N)

    def __neg__(self) -> TruncatedSeries:
        return TruncatedSeries([-c for c in self.coeffs])

    def __sub__(self, other: TruncatedSeries) -> TruncatedSeries:
        return self + (-other)

    def scale(self, c) -> TruncatedSeries:
        c = as_fraction(c)
        return TruncatedSeries([c * v for v in self.coeffs])

    def __mul__(self, other) -> TruncatedSeries:
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        N = min(self.order, other.order)
        return TruncatedSeries(_mul(self.coeffs, other.coeffs, N), N)

    def __rmul__(self, other) -> TruncatedSeries:
        return self.scale(other)

    def derivative(self) -> TruncatedSeries:
        """Formal derivative; the result is known to one order less."""
        if self.order == 0:
            return TruncatedSeries([0], 0)
        return TruncatedSeries([k * c for k, c in enumerate(self.coeffs)][1:])

    def reciprocal(self) -> TruncatedSeries:
        """1/f for f with nonzero constant term."""
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("constant term is zero")
        N = self.order
        nz = [(j, c) for j, c in enumerate(self.coeffs) if c and j]
        out = [Fraction(0)] * (N + 1)
        out[0] = 1 / c0
        for m in range(1, N + 1):
            s = Fraction(0)
            for j, c in nz:
                if j > m:
                    break
                if out[m - j]:
                    s += c * out[m - j]
            out[m] = -s / c0
        return TruncatedSeries(out, N)

    def __truediv__(self, other: TruncatedSeries) -> TruncatedSeries:
        return self * other.reciprocal()


def _scaled(cs) -> tuple[list[int], int]:
    """Integer numerators over one common denominator."""
    den = 1
    for c in cs:
        d = c.denominator
        if d != 1:
            den = den * d // gcd(den, d)
    return [c.numerator * (den // c.denominator) for c in cs], den


def _mul(a, b, N: int) -> list[Fraction]:
    # integer convolution over a common denominator: one normalisation per output
    xa, da = _scaled(a[: N + 1])
    xb, db = _scaled(b[: N + 1])
    acc = [0] * (N + 1)
    bn = [(j, c) for j, c in enumerate(xb) if c]
    for i, x in enumerate(xa):
        if not x:
            continue
        lim = N - i
        for j, y in bn:
            if j > lim:
                break
            acc[i + j] += x * y
    den = da * db
    return [Fraction(v, den) for v in acc]


def format_series(f: TruncatedSeries, var: str = "t") -> str:
    parts = []
    for e, c in f.terms().items():
        mono = "1" if e == 0 else (var if e == 1 else f"{var}^{e}")
        if e and abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}" if e == 0 else f"{abs(c)}*{mono}"
        parts.append(("- " if c < 0 else "+ ") + body)
    if not parts:
        return "0"
    s = " ".join(parts)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


def compose(g: TruncatedSeries, f: TruncatedSeries) -> TruncatedSeries:
    """g(f(t)) modulo t^(N+1), N the smaller of the two orders."""
    if f[0] != 0:
        raise ValueError("inner series must have zero constant term")
    N = min(g.order, f.order)
    out = [Fraction(0)] * (N + 1)
    out[0] = g[0]
    val = f.valuation()
    if val is None:
        return TruncatedSeries(out, N)
    power = list(f.coeffs[: N + 1])
    last = max((e for e in range(N + 1) if g[e]), default=0)
    j = 1
    while j <= last and j * val <= N:
        c = g[j]
        if c:
            for e in range(N + 1):
                if power[e]:
                    out[e] += c * power[e]
        j += 1
        if j <= last and j * val <= N:
            power = _mul(power, f.coeffs, N)
    return TruncatedSeries(out, N)


def _check_invertible(f: TruncatedSeries) -> None:
    if f[0] != 0:
        raise ValueError("series has a nonzero constant term")
    if f.order < 1 or f[1] == 0:
        raise ValueError("coefficient of t must be nonzero for compositional inversion")


def _power_coefficients(phi: list[Fraction], alpha: int, upto: int) -> list:
    """Coefficients 0..upto of phi(v)^alpha via the J.C.P. Miller recurrence."""
    p0 = phi[0]
    nz = [(j, c) for j, c in enumerate(phi[: upto + 1]) if c and j]
    integral = all(c.denominator == 1 for c in phi[: upto + 1]) and p0 in (1, -1)
    if integral:
        ph = [(j, int(c)) for j, c in nz]
        s0 = int(p0)
        out = [s0 ** abs(alpha)]
        for m in range(1, upto + 1):
            acc = 0
            for j, c in ph:
                if j > m:
                    break
                prev = out[m - j]
                if prev:
                    acc += ((alpha + 1) * j - m) * c * prev
            q, r = divmod(acc, m)
            assert r == 0
            out.append(q * s0)
        return out
    # phi = P / D with P integral; run the recurrence on P and rescale by D^(-alpha)
    ints, D = _scaled(phi[: upto + 1])
    q0 = ints[0]
    pn = [(j, c) for j, c in enumerate(ints) if c and j]
    out = [Fraction(q0) ** alpha]
    for m in range(1, upto + 1):
        acc = Fraction(0)
        for j, c in pn:
            if j > m:
                break
            prev = out[m - j]
            if prev:
                acc += prev * (((alpha + 1) * j - m) * c)
        out.append(acc / (m * q0))
    scale = Fraction(D) ** (-alpha)
    return [v * scale for v in out]


def _period(f: TruncatedSeries) -> int:
    d = 0
    for e, c in enumerate(f.coeffs):
        if c and e >= 2:
            d = gcd(d, e - 1)
    return d


def lagrange_invert(f: TruncatedSeries, order: int | None = None) -> TruncatedSeries:
    """Compositional inverse, each coefficient by coefficient extraction.

    [t^k] f^(-1) = (1/k) [u^(k-1)] (f(u)/u)^(-k). When f(u)/u = phi(u^d), only
    k = d m + 1 contributes and the extraction runs in v = u^d.
    """
    _check_invertible(f)
    N = f.order if order is None else min(order, f.order)
    out = [Fraction(0)] * (N + 1)
    d = _period(f)
    if d == 0:
        out[1] = 1 / f[1]
        return TruncatedSeries(out, N)
    phi = [f[j * d + 1] for j in range((N - 1) // d + 1)]
    for m in range((N - 1) // d + 1):
        k = d * m + 1
        coeff = _power_coefficients(phi, -k, m)[m]
        out[k] = Fraction(coeff) / k
    return TruncatedSeries(out, N)


def newton_invert(f: TruncatedSeries, order: int | None = None) -> TruncatedSeries:
    """Compositional inverse by Newton iteration y <- y - (f(y) - t) / f'(y)."""
    _check_invertible(f)
    N = f.order if order is None else min(order, f.order)
    df = f.derivative()
    y = TruncatedSeries.from_terms({1: 1 / f[1]}, 1)
    prec = 1
    while True:
        prec = min(2 * prec + 1, N)
        yp = TruncatedSeries(y.coeffs, prec)
        resid = compose(f.truncate(prec), yp) - TruncatedSeries.t(prec)
        slope = compose(TruncatedSeries(df.coeffs, prec), yp)
        step = resid / slope
        new = yp - step
        if prec == N and new == yp:
            return new
        y = new


def scan_negative(f: TruncatedSeries) -> int | None:
    """Index of the first strictly negative coefficient, or None."""
    for e, c in enumerate(f.coeffs):
        if c < 0:
            return e
    return None


def first_nonzero(f: TruncatedSeries) -> int | None:
    return f.valuation()


def gk_residual(gP: TruncatedSeries, gDual: TruncatedSeries) -> TruncatedSeries:
    """g_P(g_dual(t)) - t; identically zero for a Koszul pair."""
    h = compose(gP, gDual)
    return h - TruncatedSeries.t(h.order)


def minimal_model_generators(gP: TruncatedSeries) -> TruncatedSeries:
    """g_E(t) = t - g_P^(-1)(t), the Euler characteristics of the minimal model generators."""
    inv = lagrange_invert(gP)
    return TruncatedSeries.t(inv.order) - inv


def inverse_of_trinomial(n: int, order: int) -> TruncatedSeries:
    """Compositional inverse of t - t^n + t^(2n-1)."""
    f = TruncatedSeries.from_terms({1: 1, n: -1, 2 * n - 1: 1}, order)
    return lagrange_invert(f)


@dataclass
class GapReport:
    n: int
    by_weight: dict[int, Fraction]
    q: int | None = None
    d: int | None = None
    nonzero_after: bool = False
    truncated: bool = False
    certified_zero_weights: list[int] = field(default_factory=list)

    @property
    def has_gap(self) -> bool:
        return self.q is not None

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "by_weight": {str(p): c for p, c in self.by_weight.items()},
            "abs_by_weight": {str(p): abs(c) for p, c in self.by_weight.items()},
            "q": self.q,
            "d": self.d,
            "nonzero_after": self.nonzero_after,
            "truncated": self.truncated,
            "certified_zero_weights": self.certified_zero_weights,
        }


# weights whose generators sit in a single homological degree, so a zero
# Euler characteristic forces the space itself to vanish
SINGLE_DEGREE_WEIGHTS = (1, 2, 3)


def detect_gap(gE: TruncatedSeries, n: int) -> GapReport:
    """Scan generator Euler characteristics by weight for the first run of zeros.

    Weight p lives in arity p(n-1)+1. q is the first p >= 2 with a zero
    coefficient right after a nonzero one; d is the length of the zero run
    visible within the truncation order.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    for e, c in enumerate(gE.coeffs):
        if c and (e - 1) % (n - 1) != 0:
            raise ValueError(f"coefficient at t^{e} violates the arity constraint p(n-1)+1")
    P = (gE.order - 1) // (n - 1)
    by_weight = {p: gE[p * (n - 1) + 1] for p in range(1, P + 1)}
    report = GapReport(n, by_weight)
    for p in range(2, P + 1):
        if by_weight[p] == 0 and by_weight[p - 1] != 0:
            report.q = p
            r = p
            while r <= P and by_weight[r] == 0:
                r += 1
            report.d = r - p
            report.truncated = r > P
            report.nonzero_after = r <= P
            report.certified_zero_weights = [w for w in range(p, r) if w in SINGLE_DEGREE_WEIGHTS]
            break
    return report


# -- series files: one "exponent coefficient" pair per line -------------------------

def parse_series_text(text: str, order: int | None = None) -> TruncatedSeries:
    terms: dict[int, Fraction] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'exponent coefficient', got {line!r}")
        try:
            e, c = int(parts[0]), Fraction(parts[1])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if e < 0:
            raise ValueError(f"line {lineno}: negative exponent")
        terms[e] = terms.get(e, Fraction(0)) + c
    if order is None:
        order = max(terms, default=0)
    return TruncatedSeries.from_terms(terms, order)


def read_series(path, order: int | None = None) -> TruncatedSeries:
    return parse_series_text(Path(path).read_text(), order)


def series_to_text(f: TruncatedSeries, include_zeros: bool = False) -> str:
    lines = [f"# order {f.order}"]
    for e, c in enumerate(f.coeffs):
        if c or include_zeros:
            lines.append(f"{e} {c}")
    return "\n".join(lines) + "\n"


def write_series(f: TruncatedSeries, path) -> None:
    Path(path).write_text(series_to_text(f))
