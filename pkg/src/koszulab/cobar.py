"""The cobar differential on trees over {mu, xi} and the non-boundary certificate.

d(mu) = 0 and d(xi) = sum_i mu o_i mu, extended as a derivation. Expanding the
k-th xi-vertex in preorder (k = 1, 2, ...) carries the sign (-1)^(k-1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .linalg import solve_rational
from .trees import (
    LEAF,
    MU,
    XI,
    Alphabet,
    BudgetExceeded,
    Code,
    TreeMonomial,
    TreePolynomial,
    budget_limit,
    child_positions,
    classify_code,
    contract_code,
    count_trees,
    enumerate_codes,
    graft_poly,
    mu_comb,
    nu,
    parent_positions,
    subtree_ends,
    zero_trees,
)


def expand_xi(code: Code, pos: int, n: int) -> list[Code]:
    """The n trees obtained by replacing the xi at ``pos`` with mu o_i mu, i = 1..n."""
    arities = (0, n, 2 * n - 1)
    ends = subtree_ends(code, arities)
    kids = [code[c:ends[c]] for c in child_positions(code, ends, pos, arities)]
    head, tail = code[:pos], code[ends[pos]:]
    out = []
    for i in range(n):
        inner = (MU,) + sum(kids[i:i + n], ())
        out.append(head + (MU,) + sum(kids[:i], ()) + inner + sum(kids[i + n:], ()) + tail)
    return out


def differential_code(code: Code, n: int) -> list[tuple[Code, int]]:
    out = []
    k = 0
    for pos, s in enumerate(code):
        if s == XI:
            sign = -1 if k % 2 else 1
            out.extend((c, sign) for c in expand_xi(code, pos, n))
            k += 1
    return out


def differential(x: TreePolynomial) -> TreePolynomial:
    n = x.alphabet.n
    out = TreePolynomial(x.alphabet)
    for code, c in x.terms.items():
        for img, sign in differential_code(code, n):
            out.add_term(img, sign * c)
    return out


def differential_monomial(t: TreeMonomial) -> TreePolynomial:
    return differential(TreePolynomial.from_monomial(t))


# -- the boundary formula ------------------------------------------------------------

@dataclass
class BoundaryFormulaReport:
    n: int
    status: str
    nu_terms: int
    lhs_terms: int
    rhs_coefficient: int
    lhs_coefficient_on_comb: Fraction
    b1_is_comb: bool
    b0_empty: bool
    cancellation_ok: bool
    first_mismatch: str | None = None

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "status": self.status,
            "nu_terms": self.nu_terms,
            "lhs_terms": self.lhs_terms,
            "rhs_coefficient": self.rhs_coefficient,
            "lhs_coefficient_on_comb": self.lhs_coefficient_on_comb,
            "b1_is_comb": self.b1_is_comb,
            "b0_empty": self.b0_empty,
            "cancellation_ok": self.cancellation_ok,
            "first_mismatch": self.first_mismatch,
        }


def zero_tree_sums(n: int, budget: int | None = None) -> tuple[TreePolynomial, TreePolynomial]:
    """(B1, B0): sums of the 0-trees without singular edges, resp. without regular edges."""
    alphabet = Alphabet(n)
    b1, b0 = TreePolynomial(alphabet), TreePolynomial(alphabet)
    for S in zero_trees(n, budget):
        reg, sng = classify_code(S.code, alphabet.arities)
        if not sng:
            b1.add_term(S.code, 1)
        if not reg:
            b0.add_term(S.code, 1)
    return b1, b0


def zero_tree_cancellation(n: int, dnu: TreePolynomial | None = None, budget: int | None = None) -> list[str]:
    """Check the coefficient of every 0-tree S in d(nu) against its regular-edge count.

    For 0 < k < n the coefficient must vanish and for k = n it must be n!.
    Returns a list of failures (empty when all hold).
    """
    if dnu is None:
        dnu = differential(nu(n, budget))
    arities = (0, n, 2 * n - 1)
    failures = []
    for S in zero_trees(n, budget):
        k = len(classify_code(S.code, arities)[0])
        # the two contributions, assembled from the epsilon values they come from
        assembled = k * (-1) ** (k + n) * factorial(k - 1) * factorial(n - k) if k else 0
        if k < n:
            assembled += (n - k) * (-1) ** (k + n + 1) * factorial(k) * factorial(n - k - 1)
        expected = factorial(n) if k == n else ((-1) ** (n + 1) * factorial(n) if k == 0 else 0)
        got = dnu.coefficient(S.code)
        if assembled != expected or got != expected:
            failures.append(f"{S}: k={k}, coefficient {got}, expected {expected}")
    return failures


def verify_boundary_formula(n: int, budget: int | None = None) -> BoundaryFormulaReport:
    """Compute d(nu) and compare with n! mu^(n+1); also B1 = mu^(n+1), B0 = 0."""
    v = nu(n, budget)
    dnu = differential(v)
    comb = mu_comb(n)
    rhs = TreePolynomial.from_monomial(comb, factorial(n))
    diff = dnu - rhs
    mismatch = None
    if not diff.is_zero():
        code = min(diff.terms)
        mismatch = f"{TreeMonomial(code, v.alphabet)}: lhs {dnu.coefficient(code)}, rhs {rhs.coefficient(code)}"
    b1, b0 = zero_tree_sums(n, budget)
    failures = zero_tree_cancellation(n, dnu, budget)
    b1_ok = b1 == TreePolynomial.from_monomial(comb)
    ok = diff.is_zero() and b1_ok and b0.is_zero() and not failures
    if mismatch is None and failures:
        mismatch = failures[0]
    return BoundaryFormulaReport(
        n=n,
        status="pass" if ok else "fail",
        nu_terms=len(v),
        lhs_terms=len(dnu),
        rhs_coefficient=factorial(n),
        lhs_coefficient_on_comb=dnu.coefficient(comb),
        b1_is_comb=b1_ok,
        b0_empty=b0.is_zero(),
        cancellation_ok=not failures,
        first_mismatch=mismatch,
    )


# -- the cycle and its whistle-blower -----------------------------------------------

def cycle_cn(n: int, budget: int | None = None) -> TreePolynomial:
    """c_n = mu o_n nu - nu o_{n^2} mu."""
    v = nu(n, budget)
    m = TreePolynomial.from_monomial(mu_comb(n, 1))
    return graft_poly(m, n, v) - graft_poly(v, n * n, m)


def x_monomial(n: int) -> TreeMonomial:
    """(...((xi o_{n-1} mu) o_{n-2} mu)...) o_1 mu: mu-corollas in the first n-1 slots of xi."""
    code = (XI,) + ((MU,) + (LEAF,) * n) * (n - 1) + (LEAF,) * n
    return TreeMonomial(code, Alphabet(n))


def whistle_blower(n: int) -> TreeMonomial:
    """w_n = mu o_n x_n."""
    x = x_monomial(n)
    return TreeMonomial((MU,) + (LEAF,) * (n - 1) + x.code, x.alphabet)


def boundary_preimage_monomials(w: TreeMonomial) -> list[TreeMonomial]:
    """Degree-2 monomials whose differential has a nonzero coefficient on ``w``.

    Each term of d(y) comes from splitting one xi of y into two mu's joined by an
    edge, so the candidates are exactly the contractions of mu-mu edges of w.
    """
    if w.degree != 1:
        return []
    arities = w.alphabet.arities
    parent = parent_positions(w.code, arities)
    found = set()
    for e, s in enumerate(w.code):
        if s == MU and e > 0 and w.code[parent[e]] == MU:
            y = contract_code(w.code, e, arities)
            if y in found:
                continue
            coeff = sum(sign for img, sign in differential_code(y, w.n) if img == w.code)
            if coeff:
                found.add(y)
    return [TreeMonomial(c, w.alphabet) for c in sorted(found)]


@dataclass
class BoundaryQuery:
    target: TreePolynomial
    basis: list[TreeMonomial]
    rows: int
    solvable: bool
    rank: int
    rank_augmented: int
    witness: TreePolynomial | None = None
    notes: list[str] = field(default_factory=list)

    def certificate(self) -> dict:
        return {
            "basis_size": len(self.basis),
            "rows": self.rows,
            "rank": self.rank,
            "rank_augmented": self.rank_augmented,
            "solvable": self.solvable,
        }


def degree_slice(alphabet: Alphabet, weight: int, degree: int, budget: int | None = None) -> list[Code]:
    mus = weight - 2 * degree
    if mus < 0:
        return []
    counts = {MU: mus, XI: degree}
    limit = budget_limit(budget)
    total = count_trees(alphabet, counts)
    if total > limit:
        raise BudgetExceeded(f"degree-{degree} weight-{weight} slice has {total} monomials (budget {limit})")
    return list(enumerate_codes(alphabet.arities, counts))


def is_boundary(q: TreePolynomial, budget: int | None = None) -> BoundaryQuery:
    """Solve d(x) = q exactly over the degree-2 monomials of matching weight."""
    alphabet = q.alphabet
    if q.is_zero():
        return BoundaryQuery(q, [], 0, True, 0, 0, TreePolynomial(alphabet))
    grades = q.gradings()
    if len(grades) != 1:
        raise ValueError("target must be homogeneous")
    arity, degree, weight = grades.pop()
    if degree != 1:
        raise ValueError("target must have degree 1")
    basis = degree_slice(alphabet, weight, 2, budget)
    row_index: dict[Code, int] = {}
    columns = []
    for y in basis:
        col: dict[int, int] = {}
        for img, sign in differential_code(y, alphabet.n):
            r = row_index.setdefault(img, len(row_index))
            col[r] = col.get(r, 0) + sign
        columns.append({r: v for r, v in col.items() if v})
    target = {}
    for code, c in q.terms.items():
        target[row_index.setdefault(code, len(row_index))] = c
    res = solve_rational(columns, target)
    witness = None
    if res.solvable:
        witness = TreePolynomial(alphabet, {basis[j]: c for j, c in res.solution.items()})
    return BoundaryQuery(
        target=q,
        basis=[TreeMonomial(c, alphabet) for c in basis],
        rows=len(row_index),
        solvable=res.solvable,
        rank=res.rank,
        rank_augmented=res.rank_augmented,
        witness=witness,
    )
