"""Planar rooted trees labelled by the generators mu (n-ary) and xi (fat, (2n-1)-ary).

A tree is stored as its preorder word: a tuple over ``0`` (leaf), ``1`` (mu)
and ``2`` (xi), root first, children left to right. Leaves appear in the word
in planar order, so "slot i" is the i-th ``0`` of the word. Internal edges are
indexed by the word position of their child vertex.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Iterator, Mapping, Sequence

LEAF, MU, XI = 0, 1, 2
Code = tuple[int, ...]

DEFAULT_BUDGET = 10**6


class BudgetExceeded(RuntimeError):
    pass


def budget_limit(budget: int | None = None) -> int:
    if budget is not None:
        return budget
    env = os.environ.get("KOSZULAB_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


@dataclass(frozen=True)
class GeneratorSignature:
    name: str
    symbol: str
    arity: int
    degree: int
    weight: int


@dataclass(frozen=True, order=True)
class Alphabet:
    """The generators of the cobar complex for a fixed n >= 2."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")

    @property
    def generators(self) -> tuple[GeneratorSignature, GeneratorSignature]:
        n = self.n
        return (
            GeneratorSignature("mu", "m", n, 0, 1),
            GeneratorSignature("xi", "x", 2 * n - 1, 1, 2),
        )

    @property
    def arities(self) -> tuple[int, int, int]:
        return (0, self.n, 2 * self.n - 1)

    @property
    def degrees(self) -> tuple[int, int, int]:
        return (0, 0, 1)

    @property
    def weights(self) -> tuple[int, int, int]:
        return (0, 1, 2)

    def symbol_id(self, key) -> int:
        if key in (MU, XI):
            return key
        for i, g in enumerate(self.generators, start=1):
            if key in (g.name, g.symbol):
                return i
        raise KeyError(f"unknown generator {key!r}")


# -- raw word helpers -------------------------------------------------------------

def subtree_ends(code: Code, arities: Sequence[int]) -> list[int]:
    """ends[i] = one past the last position of the subtree rooted at i."""
    ends = [0] * len(code)
    stack: list[int] = []
    for i in range(len(code) - 1, -1, -1):
        s = code[i]
        if s == LEAF:
            ends[i] = i + 1
        else:
            e = i + 1
            for _ in range(arities[s]):
                e = ends[stack.pop()]
            ends[i] = e
        stack.append(i)
    return ends


def child_positions(code: Code, ends: Sequence[int], i: int, arities: Sequence[int]) -> list[int]:
    out = []
    j = i + 1
    for _ in range(arities[code[i]]):
        out.append(j)
        j = ends[j]
    return out


def parent_positions(code: Code, arities: Sequence[int]) -> list[int]:
    """parent[i] for each position, -1 for the root."""
    parent = [-1] * len(code)
    stack: list[list[int]] = []  # [position, remaining children]
    for i, s in enumerate(code):
        if stack:
            top = stack[-1]
            parent[i] = top[0]
            top[1] -= 1
            if top[1] == 0:
                stack.pop()
        if s != LEAF:
            stack.append([i, arities[s]])
    return parent


def is_valid_code(code: Sequence[int], arities: Sequence[int]) -> bool:
    need = 1
    for i, s in enumerate(code):
        if need == 0 or s not in (LEAF, MU, XI):
            return False
        need += arities[s] - 1
    return need == 0 and len(code) > 0


def leaf_positions(code: Code) -> list[int]:
    return [i for i, s in enumerate(code) if s == LEAF]


# -- monomials ---------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class TreeMonomial:
    code: Code
    alphabet: Alphabet

    def __post_init__(self):
        if not is_valid_code(self.code, self.alphabet.arities):
            raise ValueError(f"invalid tree word {self.code!r}")

    @property
    def n(self) -> int:
        return self.alphabet.n

    @property
    def arity(self) -> int:
        return self.code.count(LEAF)

    @property
    def degree(self) -> int:
        return self.code.count(XI)

    @property
    def weight(self) -> int:
        return self.code.count(MU) + 2 * self.code.count(XI)

    @property
    def vertex_count(self) -> int:
        return len(self.code) - self.arity

    def internal_edges(self) -> list[int]:
        """Child positions of internal edges (non-root internal vertices)."""
        return [i for i, s in enumerate(self.code) if s != LEAF and i > 0]

    def __str__(self) -> str:
        return to_nested(self)

    def digits(self) -> str:
        return to_digits(self)


def monomial(code: Iterable[int], n: int) -> TreeMonomial:
    return TreeMonomial(tuple(code), Alphabet(n))


def corolla(alphabet: Alphabet, gen=MU) -> TreeMonomial:
    g = alphabet.symbol_id(gen)
    return TreeMonomial((g,) + (LEAF,) * alphabet.arities[g], alphabet)


def identity_tree(alphabet: Alphabet) -> TreeMonomial:
    return TreeMonomial((LEAF,), alphabet)


# -- serialisation -----------------------------------------------------------------

def to_digits(t: TreeMonomial) -> str:
    """Compact form: the preorder word as digits, e.g. ``"11000"`` for mu o_1 mu at n=2."""
    return "".join(str(s) for s in t.code)


def from_digits(s: str, n: int) -> TreeMonomial:
    return TreeMonomial(tuple(int(ch) for ch in s.strip()), Alphabet(n))


def to_nested(t: TreeMonomial) -> str:
    """Nested form: ``m(m(,),)``; a leaf is the empty string."""
    code, ar = t.code, t.alphabet.arities
    symbols = {MU: "m", XI: "x"}
    out: list[str] = []

    def walk(i: int) -> int:
        s = code[i]
        if s == LEAF:
            return i + 1
        out.append(symbols[s] + "(")
        j = i + 1
        for c in range(ar[s]):
            if c:
                out.append(",")
            j = walk(j)
        out.append(")")
        return j

    walk(0)
    return "".join(out) if code != (LEAF,) else "|"


def from_nested(s: str, n: int) -> TreeMonomial:
    alphabet = Alphabet(n)
    s = s.replace(" ", "")
    if s == "|":
        return identity_tree(alphabet)
    code: list[int] = []
    pos = 0

    def parse() -> None:
        nonlocal pos
        if pos < len(s) and s[pos] in "mx":
            sym = MU if s[pos] == "m" else XI
            code.append(sym)
            pos += 1
            if s[pos] != "(":
                raise ValueError(f"expected '(' at {pos} in {s!r}")
            pos += 1
            for c in range(alphabet.arities[sym]):
                if c:
                    if s[pos] != ",":
                        raise ValueError(f"expected ',' at {pos} in {s!r}")
                    pos += 1
                parse()
            if s[pos] != ")":
                raise ValueError(f"expected ')' at {pos} in {s!r}")
            pos += 1
        else:
            code.append(LEAF)

    parse()
    if pos != len(s):
        raise ValueError(f"trailing characters in {s!r}")
    return TreeMonomial(tuple(code), alphabet)


# -- enumeration -------------------------------------------------------------------

def _normalise_counts(alphabet: Alphabet, counts: Mapping) -> dict[int, int]:
    out = {MU: 0, XI: 0}
    for k, v in counts.items():
        if v < 0:
            raise ValueError("negative vertex count")
        out[alphabet.symbol_id(k)] += v
    return out


def count_trees(alphabet: Alphabet, counts: Mapping) -> int:
    """Number of planar trees with the given vertex multiset (cycle lemma)."""
    c = _normalise_counts(alphabet, counts)
    ar = alphabet.arities
    leaves = 1 + sum(c[g] * (ar[g] - 1) for g in c)
    total = leaves + sum(c.values())
    num = factorial(total - 1)
    den = factorial(leaves)
    for g in c:
        den *= factorial(c[g])
    return num // den


def enumerate_codes(arities: Sequence[int], counts: Mapping[int, int]) -> Iterator[Code]:
    """Preorder words with the prescribed generator counts, in lexicographic order."""
    rem = {g: counts.get(g, 0) for g in (MU, XI)}
    leaves_total = 1 + sum(rem[g] * (arities[g] - 1) for g in rem)
    word: list[int] = []

    def rec(need: int, leaves: int, gens: int) -> Iterator[Code]:
        if need == 0:
            if leaves == 0 and gens == 0:
                yield tuple(word)
            return
        # a leaf may close the word only when nothing else remains
        if leaves and (need > 1 or gens == 0):
            word.append(LEAF)
            yield from rec(need - 1, leaves - 1, gens)
            word.pop()
        for g in (MU, XI):
            if rem[g]:
                rem[g] -= 1
                word.append(g)
                yield from rec(need + arities[g] - 1, leaves, gens - 1)
                word.pop()
                rem[g] += 1

    yield from rec(1, leaves_total, rem[MU] + rem[XI])


def enumerate_trees(alphabet: Alphabet, counts: Mapping, budget: int | None = None) -> list[TreeMonomial]:
    """All planar trees with exactly the given vertex multiset, canonical order."""
    c = _normalise_counts(alphabet, counts)
    limit = budget_limit(budget)
    total = count_trees(alphabet, c)
    if total > limit:
        raise BudgetExceeded(f"{total} trees exceed the budget of {limit}")
    return [TreeMonomial(code, alphabet) for code in enumerate_codes(alphabet.arities, c)]


def zero_trees(n: int, budget: int | None = None) -> list[TreeMonomial]:
    return enumerate_trees(Alphabet(n), {MU: n + 1}, budget)


def one_trees(n: int, budget: int | None = None) -> list[TreeMonomial]:
    return enumerate_trees(Alphabet(n), {MU: n - 1, XI: 1}, budget)


# -- grafting ----------------------------------------------------------------------

def graft_code(f: Code, i: int, g: Code, degrees: Sequence[int]) -> tuple[Code, int]:
    leaves = leaf_positions(f)
    if not 1 <= i <= len(leaves):
        raise IndexError(f"slot {i} out of range 1..{len(leaves)}")
    pos = leaves[i - 1]
    sign = 1
    gdeg = sum(degrees[s] for s in g)
    if gdeg % 2:
        after = sum(degrees[s] for s in f[pos + 1:])
        if after % 2:
            sign = -1
    return f[:pos] + g + f[pos + 1:], sign


def graft(f: TreeMonomial, i: int, g: TreeMonomial) -> tuple[TreeMonomial, int]:
    """Partial composition f o_i g with its Koszul sign.

    The sign is (-1)^(deg g * d) where d is the total degree of the vertices of
    f that follow slot i in preorder.
    """
    if f.alphabet != g.alphabet:
        raise ValueError("trees over different alphabets")
    code, sign = graft_code(f.code, i, g.code, f.alphabet.degrees)
    return TreeMonomial(code, f.alphabet), sign


def mu_comb(n: int, copies: int | None = None) -> TreeMonomial:
    """mu^(k): k copies of mu, each grafted into the last slot of the previous one."""
    k = n + 1 if copies is None else copies
    if k < 1:
        raise ValueError("need at least one vertex")
    code = ((MU,) + (LEAF,) * (n - 1)) * (k - 1) + (MU,) + (LEAF,) * n
    return TreeMonomial(code, Alphabet(n))


# -- spine and edge classification -------------------------------------------------

def spine_positions(code: Code, arities: Sequence[int]) -> list[int]:
    if code[0] == LEAF:
        raise ValueError("the trivial tree has no spine")
    ends = subtree_ends(code, arities)
    path = [0]
    while True:
        last = child_positions(code, ends, path[-1], arities)[-1]
        if code[last] == LEAF:
            return path
        path.append(last)


def spine(t: TreeMonomial) -> list[int]:
    """Positions of the vertices on the rightmost internal path from the root."""
    return spine_positions(t.code, t.alphabet.arities)


@dataclass(frozen=True)
class EdgeClassification:
    regular: frozenset[int]
    singular: frozenset[int]

    @property
    def edges(self) -> frozenset[int]:
        return self.regular | self.singular


def classify_code(code: Code, arities: Sequence[int]) -> tuple[list[int], list[int]]:
    ends = subtree_ends(code, arities)
    on_spine = set(spine_positions(code, arities))
    regular, singular = [], []
    for v in range(1, len(code)):
        s = code[v]
        if s == LEAF:
            continue
        bare = all(code[c] == LEAF for c in child_positions(code, ends, v, arities))
        if s == MU and bare and v not in on_spine:
            singular.append(v)
        else:
            regular.append(v)
    return regular, singular


def classify_edges(t: TreeMonomial) -> EdgeClassification:
    """Split internal edges into regular and singular ones.

    The edge above vertex v is singular when v is a mu-vertex whose children are
    all leaves and v is off the spine; every other internal edge is regular.
    Only the main spine is flattened, never the hanging subtrees.
    """
    if t.degree > 1:
        raise ValueError("edge classification needs at most one fat vertex")
    reg, sng = classify_code(t.code, t.alphabet.arities)
    return EdgeClassification(frozenset(reg), frozenset(sng))


def regular_count(code: Code, arities: Sequence[int]) -> int:
    return len(classify_code(code, arities)[0])


def contract_code(code: Code, e: int, arities: Sequence[int]) -> Code:
    ends = subtree_ends(code, arities)
    parent = parent_positions(code, arities)
    if not 0 < e < len(code) or code[e] == LEAF:
        raise ValueError(f"position {e} is not the child end of an internal edge")
    p = parent[e]
    if code[p] != MU or code[e] != MU:
        raise ValueError("only an edge between two mu-vertices can be collapsed")
    # the child's children take the child's place among the parent's children
    return code[:p] + (XI,) + code[p + 1:e] + code[e + 1:ends[e]] + code[ends[e]:]


def contract_edge(S: TreeMonomial, e: int) -> TreeMonomial:
    """Collapse the internal edge above position e into one fat vertex."""
    return TreeMonomial(contract_code(S.code, e, S.alphabet.arities), S.alphabet)


def epsilon_from_regular(g: int, n: int) -> int:
    if not 0 <= g <= n - 1:
        raise ValueError(f"regular edge count {g} out of range for n={n}")
    sign = -1 if (g + n + 1) % 2 else 1
    return sign * factorial(g) * factorial(n - g - 1)


def epsilon(T: TreeMonomial) -> int:
    """(-1)^(g+n+1) g! (n-g-1)! with g the number of regular edges of the 1-tree T."""
    n = T.n
    if T.degree != 1 or T.code.count(MU) != n - 1:
        raise ValueError("epsilon is defined on 1-trees only")
    return epsilon_from_regular(regular_count(T.code, T.alphabet.arities), n)


# -- polynomials -------------------------------------------------------------------

class TreePolynomial:
    """Finite rational linear combination of tree monomials over one alphabet."""

    __slots__ = ("alphabet", "terms")

    def __init__(self, alphabet: Alphabet, terms: Mapping[Code, object] | None = None):
        self.alphabet = alphabet
        self.terms: dict[Code, Fraction] = {}
        if terms:
            for code, c in terms.items():
                c = Fraction(c)
                if c:
                    self.terms[tuple(code)] = c

    @classmethod
    def from_monomial(cls, t: TreeMonomial, coeff=1) -> TreePolynomial:
        return cls(t.alphabet, {t.code: coeff})

    @classmethod
    def zero(cls, alphabet: Alphabet) -> TreePolynomial:
        return cls(alphabet)

    def copy(self) -> TreePolynomial:
        out = TreePolynomial(self.alphabet)
        out.terms = dict(self.terms)
        return out

    def add_term(self, code: Code, c) -> None:
        v = self.terms.get(code, 0) + c
        if v:
            self.terms[code] = Fraction(v)
        else:
            self.terms.pop(code, None)

    def coefficient(self, t) -> Fraction:
        code = t.code if isinstance(t, TreeMonomial) else tuple(t)
        return self.terms.get(code, Fraction(0))

    def monomials(self) -> list[TreeMonomial]:
        return [TreeMonomial(c, self.alphabet) for c in sorted(self.terms)]

    def items(self) -> list[tuple[TreeMonomial, Fraction]]:
        return [(TreeMonomial(c, self.alphabet), self.terms[c]) for c in sorted(self.terms)]

    def is_zero(self) -> bool:
        return not self.terms

    def gradings(self) -> set[tuple[int, int, int]]:
        """Set of (arity, degree, weight) over the support."""
        return {(c.count(LEAF), c.count(XI), c.count(MU) + 2 * c.count(XI)) for c in self.terms}

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, TreePolynomial):
            return self.alphabet == other.alphabet and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __add__(self, other: TreePolynomial) -> TreePolynomial:
        out = self.copy()
        for code, c in other.terms.items():
            out.add_term(code, c)
        return out

    def __neg__(self) -> TreePolynomial:
        return self.scale(-1)

    def __sub__(self, other: TreePolynomial) -> TreePolynomial:
        return self + (-other)

    def scale(self, c) -> TreePolynomial:
        return TreePolynomial(self.alphabet, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, c) -> TreePolynomial:
        return self.scale(c)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for code in sorted(self.terms):
            c = self.terms[code]
            parts.append(f"{c}*{to_nested(TreeMonomial(code, self.alphabet))}")
        return " + ".join(parts)


def graft_poly(f: TreePolynomial, i: int, g: TreePolynomial) -> TreePolynomial:
    """Bilinear extension of :func:`graft`."""
    out = TreePolynomial(f.alphabet)
    degrees = f.alphabet.degrees
    for fc, a in f.terms.items():
        for gc, b in g.terms.items():
            code, sign = graft_code(fc, i, gc, degrees)
            out.add_term(code, sign * a * b)
    return out


def nu(n: int, budget: int | None = None) -> TreePolynomial:
    """Signed sum of all 1-trees T weighted by epsilon(T)."""
    alphabet = Alphabet(n)
    out = TreePolynomial(alphabet)
    for T in one_trees(n, budget):
        out.terms[T.code] = Fraction(epsilon(T))
    return out
