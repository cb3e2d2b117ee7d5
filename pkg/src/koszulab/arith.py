"""Exact arithmetic: univariate polynomials, real-root counting, prime fields.

Integers and rationals are Python ``int`` and :class:`fractions.Fraction`.
Everything here is exact; nothing ever touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from numbers import Rational
from typing import Iterable, Sequence


class IrrationalRootsError(ValueError):
    """Raised when a quadratic has no pair of rational roots."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


class UniPoly:
    """Univariate polynomial with exact rational coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def x(cls) -> UniPoly:
        return cls([0, 1])

    @classmethod
    def constant(cls, c) -> UniPoly:
        return cls([c])

    @classmethod
    def from_roots(cls, roots: Iterable) -> UniPoly:
        p = cls([1])
        for r in roots:
            p = p * cls([-as_fraction(r), 1])
        return p

    @classmethod
    def monomial(cls, c, k: int) -> UniPoly:
        return cls([0] * k + [c])

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == UniPoly([other]).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"UniPoly({[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if mono and abs(c) == 1:
                term = mono
            else:
                term = f"{abs(c)}*{mono}" if mono else f"{abs(c)}"
            parts.append(("-" if c < 0 else "+") + " " + term)
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[1:]

    def __neg__(self) -> UniPoly:
        return UniPoly([-c for c in self.coeffs])

    def __add__(self, other) -> UniPoly:
        other = _lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly([self[k] + other[k] for k in range(n)])

    __radd__ = __add__

    def __sub__(self, other) -> UniPoly:
        return self + (-_lift(other))

    def __rsub__(self, other) -> UniPoly:
        return _lift(other) - self

    def __mul__(self, other) -> UniPoly:
        other = _lift(other)
        if not self.coeffs or not other.coeffs:
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> UniPoly:
        out = UniPoly([1])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __call__(self, x):
        return poly_eval(self, x)

    def divmod(self, other: UniPoly) -> tuple[UniPoly, UniPoly]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(len(rem) - other.degree, 1)
        lc = other.leading
        dv = other.degree
        for k in range(len(rem) - 1, dv - 1, -1):
            c = rem[k]
            if c == 0:
                continue
            f = c / lc
            q[k - dv] = f
            for j, b in enumerate(other.coeffs):
                rem[k - dv + j] -= f * b
        return UniPoly(q), UniPoly(rem[:dv] if dv > 0 else [])

    def derivative(self) -> UniPoly:
        return UniPoly([k * c for k, c in enumerate(self.coeffs)][1:])

    def compose(self, other: UniPoly) -> UniPoly:
        out = UniPoly()
        for c in reversed(self.coeffs):
            out = out * other + c
        return out

    def shift(self, b) -> UniPoly:
        """Return p(x + b) by repeated synthetic division."""
        b = as_fraction(b)
        a = list(self.coeffs)
        d = len(a)
        for i in range(d - 1):
            for j in range(d - 2, i - 1, -1):
                a[j] += b * a[j + 1]
        return UniPoly(a)

    def monic(self) -> UniPoly:
        lc = self.leading
        return UniPoly([c / lc for c in self.coeffs])

    def integer_coeffs(self) -> list[int]:
        """Positive rescaling to a primitive integer polynomial (same roots, same signs)."""
        if not self.coeffs:
            return []
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        return _primitive(ints)


def _lift(x) -> UniPoly:
    return x if isinstance(x, UniPoly) else UniPoly([x])


def poly_eval(p: UniPoly, x) -> Fraction:
    """Exact value p(x) by Horner's rule."""
    x = as_fraction(x)
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


# -- integer polynomial helpers (lowest degree first, no trailing zeros) ---------

def _strip(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _content(a: Sequence[int]) -> int:
    g = 0
    for c in a:
        g = gcd(g, c)
    return g


def _primitive(a: Sequence[int]) -> list[int]:
    """Divide by the positive content; the sign is kept."""
    a = _strip(list(a))
    g = _content(a)
    return [c // g for c in a] if g > 1 else a


def _int_eval(a: Sequence[int], x: Fraction) -> Fraction:
    # homogenised Horner keeps the arithmetic in integers
    p, q = x.numerator, x.denominator
    acc = 0
    qk = 1
    for c in reversed(a):
        acc = acc * p + c * qk
        qk *= q
    return Fraction(acc, qk // q) if a else Fraction(0)


def _prem(f: list[int], g: list[int]) -> list[int]:
    """Pseudo-remainder of f by g: a positive multiple of the true remainder."""
    r = list(f)
    dg = len(g) - 1
    lc = g[-1]
    alc = abs(lc)
    sgn = 1 if lc > 0 else -1
    while len(r) - 1 >= dg and r:
        dr = len(r) - 1
        c = r[-1]
        # r <- |lc| r - sgn*c x^(dr-dg) g
        r = [alc * v for v in r]
        for j, b in enumerate(g):
            r[dr - dg + j] -= sgn * c * b
        _strip(r)
    return r


def _int_derivative(a: Sequence[int]) -> list[int]:
    return [k * c for k, c in enumerate(a)][1:]


def _int_gcd(f: list[int], g: list[int]) -> list[int]:
    """Primitive gcd over Z[x] via the primitive remainder sequence."""
    a, b = _primitive(f), _primitive(g)
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = _primitive(_prem(a, b))
        a, b = b, r
    return _primitive(a) if a else a


def _int_exact_div(f: list[int], g: list[int]) -> list[int]:
    """Quotient f/g over Q, rescaled to a primitive integer polynomial with positive leading sign kept."""
    q, r = UniPoly(f).divmod(UniPoly(g))
    assert r.is_zero(), "non-exact division"
    ints = q.integer_coeffs()
    # keep the sign of the true quotient
    if ints and (ints[-1] > 0) != (q.leading > 0):
        ints = [-c for c in ints]
    return ints


def _coprime_mod(f: list[int], g: list[int], prime: int) -> bool:
    """True when f and g are certainly coprime over Q.

    If the prime does not divide the leading coefficient of f, the degree of
    gcd(f, g) over Q is at most the degree of the gcd of the reductions.
    """
    if f[-1] % prime == 0:
        return False
    a = _strip([c % prime for c in f])
    b = _strip([c % prime for c in g])
    while b:
        inv = pow(b[-1], -1, prime)
        while len(a) >= len(b) and a:
            c = a[-1] * inv % prime
            shift = len(a) - len(b)
            for j, v in enumerate(b):
                a[shift + j] = (a[shift + j] - c * v) % prime
            _strip(a)
        a, b = b, a
    return len(a) == 1


def squarefree_part(p: UniPoly) -> UniPoly:
    """p / gcd(p, p'), as a primitive integer polynomial with the sign of p's leading term."""
    if p.is_zero():
        raise ValueError("zero polynomial")
    a = p.integer_coeffs()
    if p.leading < 0 and a[-1] > 0:
        a = [-c for c in a]
    if len(a) <= 2 or _coprime_mod(a, _int_derivative(a), MERSENNE_61):
        return UniPoly(a)
    g = _int_gcd(a, _int_derivative(a))
    if len(g) <= 1:
        return UniPoly(a)
    q = _int_exact_div(a, g)
    if (q[-1] > 0) != (a[-1] > 0):
        q = [-c for c in q]
    return UniPoly(q)


def sturm_sequence(p: UniPoly) -> list[UniPoly]:
    """Sturm chain of the squarefree part of ``p``.

    Members are primitive integer polynomials; each is a positive multiple of the
    classical chain member, so sign variations are unchanged.
    """
    if p.is_zero():
        raise ValueError("Sturm sequence of the zero polynomial")
    s0 = squarefree_part(p).integer_coeffs()
    chain = [s0]
    s1 = _primitive(_int_derivative(s0))
    if s1:
        chain.append(s1)
    while len(chain[-1]) > 1:
        r = _prem(chain[-2], chain[-1])
        if not r:
            break
        chain.append(_primitive([-c for c in r]))
    return [UniPoly(c) for c in chain]


def sign_variations(values: Iterable) -> int:
    """Number of sign changes in a sequence, zeros skipped."""
    last = 0
    count = 0
    for v in values:
        s = (v > 0) - (v < 0)
        if s == 0:
            continue
        if last and s != last:
            count += 1
        last = s
    return count


def _chain_ints(chain: Sequence[UniPoly]) -> list[list[int]]:
    return [[int(c) for c in q.coeffs] for q in chain]


def _variations_at(chain_ints: list[list[int]], x) -> int:
    if x == "inf":
        return sign_variations(c[-1] for c in chain_ints)
    if x == "-inf":
        return sign_variations(c[-1] * (-1) ** (len(c) - 1) for c in chain_ints)
    x = as_fraction(x)
    return sign_variations(_int_eval(c, x) for c in chain_ints)


class SturmChain:
    """A Sturm chain computed once and evaluated at many points."""

    def __init__(self, p: UniPoly):
        self.poly = p
        self.chain = sturm_sequence(p)
        self._ints = _chain_ints(self.chain)

    def variations(self, x) -> int:
        return _variations_at(self._ints, x)

    def count(self, a, b) -> int:
        """Distinct real roots in (a, b]; ``a`` may be "-inf" and ``b`` "inf"."""
        return self.variations(a) - self.variations(b)

    def isolate_largest(self, lo, hi, width) -> tuple[Fraction, Fraction] | None:
        """Bisect (lo, hi] to the given width around the largest root inside it."""
        lo, hi, width = as_fraction(lo), as_fraction(hi), as_fraction(width)
        if self.count(lo, hi) == 0:
            return None
        while hi - lo > width:
            mid = (lo + hi) / 2
            if self.count(mid, hi) > 0:
                lo = mid
            else:
                hi = mid
        return lo, hi


def sturm_count(p: UniPoly, a, b) -> int:
    """Number of distinct real roots of p in the half-open interval (a, b].

    ``a`` may be ``"-inf"`` and ``b`` may be ``"inf"``.
    """
    return SturmChain(p).count(a, b)


def descartes_bound(p: UniPoly) -> int:
    """Sign variations of the coefficients: an upper bound on positive roots."""
    return sign_variations(p.coeffs)


def count_real_roots_above(p: UniPoly, bound) -> int:
    """Number of distinct real roots strictly greater than ``bound``.

    Descartes' test on the shifted squarefree part is tried first; it is decisive
    when it reports 0 or 1 variations. Otherwise a Sturm count on (bound, inf).
    """
    if p.is_zero():
        raise ValueError("root count of the zero polynomial is undefined")
    bound = as_fraction(bound)
    sf = squarefree_part(p)
    shifted = sf.shift(bound)
    # a root exactly at the bound shows up as a zero constant term
    k = 0
    while shifted[k] == 0 and k < shifted.degree:
        k += 1
    shifted = UniPoly(shifted.coeffs[k:])
    v = descartes_bound(shifted)
    if v <= 1:
        return v
    return sturm_count(sf, bound, "inf")


def cauchy_bound(p: UniPoly) -> Fraction:
    """All real roots lie in (-B, B)."""
    lc = abs(p.leading)
    return 1 + max((abs(c) / lc for c in p.coeffs[:-1]), default=Fraction(0))


def count_real_roots(p: UniPoly) -> int:
    b = cauchy_bound(p)
    return sturm_count(p, -b, b)


def quadratic_roots_exact(a, b, c) -> tuple[Fraction, Fraction]:
    """Both roots of a x^2 + b x + c, ascending, when they are rational."""
    a, b, c = as_fraction(a), as_fraction(b), as_fraction(c)
    if a == 0:
        raise ValueError("leading coefficient must be nonzero")
    den = a.denominator * b.denominator * c.denominator
    A, B, C = int(a * den), int(b * den), int(c * den)
    disc = B * B - 4 * A * C
    if disc < 0:
        raise IrrationalRootsError(f"negative discriminant {disc}")
    s = isqrt(disc)
    if s * s != disc:
        raise IrrationalRootsError(f"discriminant {disc} is not a perfect square")
    r1 = Fraction(-B - s, 2 * A)
    r2 = Fraction(-B + s, 2 * A)
    return (r1, r2) if r1 <= r2 else (r2, r1)


# -- prime fields -----------------------------------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


MERSENNE_61 = (1 << 61) - 1
PRIME_62 = (1 << 62) - 57
DEFAULT_PRIMES = (MERSENNE_61, PRIME_62)


@dataclass(frozen=True)
class ModP:
    """Residue class modulo a prime p < 2**62."""

    value: int
    p: int

    def __post_init__(self):
        if not 2 <= self.p < 1 << 62:
            raise ValueError("modulus out of range")
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other) -> int:
        if isinstance(other, ModP):
            if other.p != self.p:
                raise ValueError("mixed moduli")
            return other.value
        if isinstance(other, int):
            return other % self.p
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p) % self.p
        return NotImplemented

    def __add__(self, other):
        return ModP(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return ModP(self.value - self._coerce(other), self.p)

    def __rsub__(self, other):
        return ModP(self._coerce(other) - self.value, self.p)

    def __mul__(self, other):
        return ModP(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return ModP(-self.value, self.p)

    def inverse(self) -> ModP:
        if self.value == 0:
            raise ZeroDivisionError("zero has no inverse")
        return ModP(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, other):
        return self * ModP(self._coerce(other), self.p).inverse()

    def __pow__(self, k: int):
        return ModP(pow(self.value, k, self.p), self.p)

    def __int__(self) -> int:
        return self.value
