"""Exact computations for the nonsymmetric operad with one n-ary generator mu and
the relation sum_i mu o_i mu = 0: its cobar complex, dimensions, and the
functional-equation test for Koszulness."""

from __future__ import annotations

__version__ = "0.1.0"

from .arith import (
    DEFAULT_PRIMES,
    IrrationalRootsError,
    ModP,
    SturmChain,
    UniPoly,
    count_real_roots_above,
    descartes_bound,
    quadratic_roots_exact,
    sturm_count,
    sturm_sequence,
)
from .cobar import (
    BoundaryQuery,
    boundary_preimage_monomials,
    cycle_cn,
    differential,
    is_boundary,
    verify_boundary_formula,
    whistle_blower,
    x_monomial,
)
from .dims import (
    ConsequenceMatrix,
    DimensionSeries,
    build_consequence_matrix,
    consequence_count,
    free_dim,
    poincare_series,
    rank_mod_p,
)
from .hypergeom import (
    PositivityReport,
    Recurrence,
    a_closed,
    a_from_inversion,
    b_table,
    char_roots,
    guess_recurrence,
    positivity_certificate,
    radius_facts,
    residual_check,
    three_term_recurrence,
)
from .series import (
    GapReport,
    TruncatedSeries,
    compose,
    detect_gap,
    gk_residual,
    lagrange_invert,
    minimal_model_generators,
    newton_invert,
    scan_negative,
)
from .trees import (
    Alphabet,
    BudgetExceeded,
    TreeMonomial,
    TreePolynomial,
    classify_edges,
    enumerate_trees,
    epsilon,
    from_nested,
    graft,
    nu,
    to_nested,
)
