"""Dimensions of the weight components of the operad with one n-ary generator mu
and the single relation sum_i mu o_i mu = 0, by exact sparse rank.

The weight-w part of the ideal is spanned by the relation inserted at the xi
vertex of a slot-tree (w-2 mu's and one xi). Its image in the mu-only basis is
exactly the cobar differential of the slot-tree, so each consequence row is a
d-expansion with all signs +1 (a single xi).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from pathlib import Path

from .arith import DEFAULT_PRIMES, is_prime
from .cobar import expand_xi
from .linalg import rank_mod_p as _rank_mod_p
from .linalg import rank_rational
from .series import TruncatedSeries
from .trees import MU, XI, Alphabet, BudgetExceeded, Code, count_trees, enumerate_codes, graft_code

DEFAULT_COLUMN_BUDGET = 10**5


def free_dim(n: int, w: int) -> int:
    """Number of planar trees with w n-ary vertices (Fuss-Catalan)."""
    if n < 2 or w < 0:
        raise ValueError("need n >= 2 and w >= 0")
    q, r = divmod(comb(n * w, w), w * (n - 1) + 1)
    assert r == 0
    return q


def consequence_count(n: int, w: int) -> int:
    """Number of slot-trees: planar trees with w-2 mu's and one (2n-1)-ary vertex."""
    if w < 2:
        raise ValueError("consequences start in weight 2")
    return comb(n * w - 1, w - 2)


@dataclass
class ConsequenceMatrix:
    n: int
    weight: int
    rows: list[dict[int, int]]
    columns: list[Code]
    row_trees: list[Code]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.columns)

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def triplets(self):
        for i, row in enumerate(self.rows):
            for j in sorted(row):
                yield i, j, row[j]

    def to_triplet_text(self) -> str:
        head = f"# rows {len(self.rows)} cols {len(self.columns)} n {self.n} weight {self.weight}\n"
        return head + "".join(f"{i} {j} {v}\n" for i, j, v in self.triplets())

    def write_triplets(self, path) -> None:
        Path(path).write_text(self.to_triplet_text())


def build_consequence_matrix(n: int, w: int, column_budget: int | None = None) -> ConsequenceMatrix:
    alphabet = Alphabet(n)
    limit = DEFAULT_COLUMN_BUDGET if column_budget is None else column_budget
    ncols = free_dim(n, w)
    if ncols > limit:
        raise BudgetExceeded(f"weight {w} has {ncols} columns (budget {limit})")
    columns = list(enumerate_codes(alphabet.arities, {MU: w}))
    index = {c: i for i, c in enumerate(columns)}
    row_trees = list(enumerate_codes(alphabet.arities, {MU: w - 2, XI: 1})) if w >= 2 else []
    rows = []
    for code in row_trees:
        pos = code.index(XI)
        row: dict[int, int] = {}
        for img in expand_xi(code, pos, n):
            k = index[img]
            row[k] = row.get(k, 0) + 1
        rows.append({k: v for k, v in row.items() if v})
    return ConsequenceMatrix(n, w, rows, columns, row_trees)


def rank_mod_p(M: ConsequenceMatrix, p: int) -> int:
    return _rank_mod_p(M.rows, p)


def ideal_closure_rank(n: int, w: int) -> int:
    """Rank of the weight-w ideal built by closing {relation} under o_i with mu on both sides.

    Independent of the slot-tree description; used to test that single-slot
    insertions already span the ideal.
    """
    alphabet = Alphabet(n)
    index: dict[Code, int] = {}

    def key(c):
        return index.setdefault(c, len(index))

    degrees = alphabet.degrees
    mu = (MU,) + (0,) * n
    relation = {}
    for i in range(1, n + 1):
        code, _ = graft_code(mu, i, mu, degrees)
        relation[code] = relation.get(code, 0) + 1
    layer = [relation]
    for weight in range(3, w + 1):
        new = []
        for vec in _basis(layer):
            arity = (weight - 1) * (n - 1) + 1
            for i in range(1, arity + 1):
                out: dict[Code, int] = {}
                for code, c in vec.items():
                    g, _ = graft_code(code, i, mu, degrees)
                    out[g] = out.get(g, 0) + c
                new.append(out)
            for i in range(1, n + 1):
                out = {}
                for code, c in vec.items():
                    g, _ = graft_code(mu, i, code, degrees)
                    out[g] = out.get(g, 0) + c
                new.append(out)
        layer = new
    return rank_rational([{key(c): v for c, v in vec.items()} for vec in layer])


def _basis(vectors: list[dict[Code, int]]) -> list[dict[Code, int]]:
    """A linearly independent subset with the same span (keeps the closure small)."""
    index: dict[Code, int] = {}
    chosen = []
    pivots: dict[int, dict[int, Fraction]] = {}
    for vec in vectors:
        row = {index.setdefault(c, len(index)): Fraction(v) for c, v in vec.items() if v}
        while row:
            lead = min(row)
            prow = pivots.get(lead)
            if prow is None:
                c = row[lead]
                pivots[lead] = {k: v / c for k, v in row.items()}
                chosen.append(vec)
                break
            f = row[lead]
            for k, v in prow.items():
                nv = row.get(k, 0) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
    return chosen


@dataclass
class WeightRecord:
    weight: int
    free: int
    consequences: int
    ranks: dict[int, int] = field(default_factory=dict)
    exact_rank: int | None = None
    dim: int = 0
    agree: bool = True

    def as_dict(self) -> dict:
        return {
            "weight": self.weight,
            "free": self.free,
            "consequences": self.consequences,
            "rank": {str(p): r for p, r in self.ranks.items()},
            "exact_rank": self.exact_rank,
            "dim": self.dim,
            "primes_agree": self.agree,
        }


@dataclass
class DimensionSeries:
    n: int
    records: list[WeightRecord]
    primes: tuple[int, ...]

    @property
    def flagged(self) -> bool:
        return any(not r.agree for r in self.records)

    def dims(self) -> list[int]:
        return [r.dim for r in self.records]

    def series(self) -> TruncatedSeries:
        top = self.records[-1].weight
        order = top * (self.n - 1) + 1
        return TruncatedSeries.from_terms(
            {r.weight * (self.n - 1) + 1: r.dim for r in self.records}, order
        )

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "primes": list(self.primes),
            "weights": [r.as_dict() for r in self.records],
            "flagged": self.flagged,
            "series": {str(e): c for e, c in self.series().terms().items()},
        }


def poincare_series(
    n: int,
    max_weight: int,
    primes=DEFAULT_PRIMES,
    exact_upto: int = 3,
    column_budget: int | None = None,
) -> DimensionSeries:
    """Dimensions of weights 0..max_weight; the series sum_w dim_w t^(w(n-1)+1).

    Generators and relation sit in degree 0, so these are plain dimensions.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    primes = tuple(primes)
    for p in primes:
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
    records = []
    for w in range(max_weight + 1):
        free = free_dim(n, w)
        if w < 2:
            records.append(WeightRecord(w, free, 0, {p: 0 for p in primes}, 0 if w <= exact_upto else None, free))
            continue
        M = build_consequence_matrix(n, w, column_budget)
        ranks = {p: rank_mod_p(M, p) for p in primes}
        exact = rank_rational(M.rows) if w <= exact_upto else None
        values = set(ranks.values()) | ({exact} if exact is not None else set())
        agree = len(values) == 1
        rank = max(values)
        rec = WeightRecord(w, free, len(M.rows), ranks, exact, free - rank, agree)
        assert free - rec.consequences <= rec.dim <= free
        records.append(rec)
    return DimensionSeries(n, records, primes)


def enumerated_slot_tree_count(n: int, w: int) -> int:
    return count_trees(Alphabet(n), {MU: w - 2, XI: 1})
