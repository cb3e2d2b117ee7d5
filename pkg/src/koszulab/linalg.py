"""Sparse exact linear algebra: rank over GF(p) and over Q, rational solve.

Sparse vectors are ``dict[int, value]`` with no stored zeros. Pivoting always
takes the lowest column index, so results are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping

from .arith import is_prime

SparseRow = Mapping[int, int]


def rank_mod_p(rows: Iterable[SparseRow], p: int) -> int:
    """Rank of a sparse integer matrix over the field with p elements.

    Rows are reduced one at a time against an echelon basis keyed by leading
    column (the lowest column index present).
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    pivots: dict[int, dict[int, int]] = {}
    for src in rows:
        row = {k: v % p for k, v in src.items() if v % p}
        while row:
            lead = min(row)
            prow = pivots.get(lead)
            if prow is None:
                inv = pow(row[lead], -1, p)
                pivots[lead] = {k: v * inv % p for k, v in row.items()}
                break
            f = row[lead]
            for k, v in prow.items():
                nv = (row.get(k, 0) - f * v) % p
                if nv:
                    row[k] = nv
                else:
                    del row[k]
    return len(pivots)


def rank_rational(rows: Iterable[Mapping[int, object]]) -> int:
    """Exact rank over Q."""
    pivots: dict[int, dict[int, Fraction]] = {}
    for src in rows:
        row = {k: Fraction(v) for k, v in src.items() if v}
        while row:
            lead = min(row)
            prow = pivots.get(lead)
            if prow is None:
                c = row[lead]
                pivots[lead] = {k: v / c for k, v in row.items()}
                break
            f = row[lead]
            for k, v in prow.items():
                nv = row.get(k, 0) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
    return len(pivots)


@dataclass
class SolveResult:
    """Outcome of solving A x = b over Q, columns of A given as sparse vectors."""

    solvable: bool
    rank: int
    rank_augmented: int
    solution: dict[int, Fraction] = field(default_factory=dict)


def solve_rational(columns: list[Mapping[int, object]], target: Mapping[int, object]) -> SolveResult:
    """Find x with sum_j x_j columns[j] = target, exactly.

    Each echelon vector carries its expression in the original columns, so a
    consistent system yields an explicit witness. An inconsistent one is
    certified by rank(A) < rank([A | b]).
    """
    basis: dict[int, tuple[dict[int, Fraction], dict[int, Fraction]]] = {}

    def reduce(vec: dict[int, Fraction], combo: dict[int, Fraction]):
        while vec:
            lead = min(vec)
            entry = basis.get(lead)
            if entry is None:
                return lead
            bvec, bcombo = entry
            f = vec[lead]
            for k, v in bvec.items():
                nv = vec.get(k, 0) - f * v
                if nv:
                    vec[k] = nv
                else:
                    vec.pop(k, None)
            for k, v in bcombo.items():
                nv = combo.get(k, 0) - f * v
                if nv:
                    combo[k] = nv
                else:
                    combo.pop(k, None)
        return None

    for j, col in enumerate(columns):
        vec = {k: Fraction(v) for k, v in col.items() if v}
        combo = {j: Fraction(1)}
        lead = reduce(vec, combo)
        if lead is not None:
            c = vec[lead]
            basis[lead] = ({k: v / c for k, v in vec.items()}, {k: v / c for k, v in combo.items()})

    rank = len(basis)
    vec = {k: Fraction(v) for k, v in target.items() if v}
    # track  target - sum(combo_j * col_j) = vec
    combo: dict[int, Fraction] = {}
    lead = reduce(vec, combo)
    if lead is not None:
        return SolveResult(False, rank, rank + 1)
    solution = {k: -v for k, v in combo.items() if v}
    return SolveResult(True, rank, rank, solution)


def nullspace_rational(rows: list[list[int]], ncols: int) -> list[list[Fraction]]:
    """Basis of {x : A x = 0} over Q for a dense integer matrix, from the reduced echelon form.

    Elimination is fraction-free on integer rows; only the final back-substitution
    divides. Each basis vector has a 1 in its free column.
    """
    work = [list(r) for r in rows]
    pivot_cols: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(work)) if work[i][c]), None)
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        prow = work[r]
        g = 0
        for v in prow:
            g = gcd(g, v)
        if g > 1:
            prow[:] = [v // g for v in prow]
        for i in range(len(work)):
            if i != r and work[i][c]:
                f, p = work[i][c], prow[c]
                row = [p * a - f * b for a, b in zip(work[i], prow)]
                g = 0
                for v in row:
                    g = gcd(g, v)
                work[i] = [v // g for v in row] if g > 1 else row
        pivot_cols.append(c)
        r += 1
        if r == len(work):
            break
    free = [c for c in range(ncols) if c not in set(pivot_cols)]
    basis = []
    for fc in free:
        x = [Fraction(0)] * ncols
        x[fc] = Fraction(1)
        for i, pc in enumerate(pivot_cols):
            x[pc] = Fraction(-work[i][fc], work[i][pc])
        basis.append(x)
    return basis
