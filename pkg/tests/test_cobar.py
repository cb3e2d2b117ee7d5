from __future__ import annotations

from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from koszulab.cobar import (
    boundary_preimage_monomials,
    cycle_cn,
    degree_slice,
    differential,
    differential_monomial,
    is_boundary,
    zero_tree_cancellation,
    verify_boundary_formula,
    whistle_blower,
    x_monomial,
    zero_tree_sums,
)
from koszulab.trees import (
    MU,
    XI,
    Alphabet,
    BudgetExceeded,
    TreePolynomial,
    corolla,
    enumerate_trees,
    epsilon,
    from_nested,
    graft,
    graft_poly,
    mu_comb,
    nu,
)


def test_differential_of_corolla():
    d = differential_monomial(corolla(Alphabet(2), XI))
    assert {str(t): c for t, c in d.items()} == {"m(m(,),)": 1, "m(,m(,))": 1}


def test_differential_kills_mu_only():
    assert differential_monomial(mu_comb(3)).is_zero()


def test_differential_of_nu_n2():
    d = differential(nu(2))
    assert d == TreePolynomial.from_monomial(mu_comb(2), 2)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_d_squared_exhaustive_degree_two(n):
    a = Alphabet(n)
    for mus in range(0, 3):
        for t in enumerate_trees(a, {MU: mus, XI: 2}):
            assert differential(differential_monomial(t)).is_zero(), str(t)


@settings(max_examples=60)
@given(st.integers(2, 4), st.integers(0, 2), st.data())
def test_d_squared_random_degree_three(n, mus, data):
    trees = enumerate_trees(Alphabet(n), {MU: mus, XI: 3})
    t = data.draw(st.sampled_from(trees))
    assert differential(differential(differential_monomial(t))).is_zero()


@settings(max_examples=80)
@given(st.integers(2, 3), st.data())
def test_derivation_property(n, data):
    a = Alphabet(n)
    shapes = [(1, 0), (0, 1), (1, 1), (2, 1), (0, 2)]
    fm, fx = data.draw(st.sampled_from(shapes))
    gm, gx = data.draw(st.sampled_from(shapes))
    f = data.draw(st.sampled_from(enumerate_trees(a, {MU: fm, XI: fx})))
    g = data.draw(st.sampled_from(enumerate_trees(a, {MU: gm, XI: gx})))
    i = data.draw(st.integers(1, f.arity))
    F, G = TreePolynomial.from_monomial(f), TreePolynomial.from_monomial(g)
    lhs = differential(graft_poly(F, i, G))
    rhs = graft_poly(differential(F), i, G) + graft_poly(F, i, differential(G)).scale((-1) ** f.degree)
    assert lhs == rhs


@pytest.mark.parametrize("n", [2, 3, 4])
def test_boundary_formula(n):
    rep = verify_boundary_formula(n)
    assert rep.status == "pass", rep.first_mismatch
    assert rep.lhs_terms == 1 and rep.lhs_coefficient_on_comb == factorial(n)
    assert rep.b1_is_comb and rep.b0_empty and rep.cancellation_ok


@pytest.mark.parametrize("n", [2, 3, 4])
def test_zero_tree_sums(n):
    b1, b0 = zero_tree_sums(n)
    assert b1 == TreePolynomial.from_monomial(mu_comb(n)) and b0.is_zero()


def test_cancellation_detects_a_wrong_nu():
    bad = nu(3)
    code = next(iter(bad.terms))
    bad.add_term(code, 1)
    assert zero_tree_cancellation(3, differential(bad))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_cycle(n):
    c = cycle_cn(n)
    assert differential(c).is_zero()
    assert c.gradings() == {(n * n + n - 1, 1, n + 2)}
    w = whistle_blower(n)
    assert c.coefficient(w.code) == (-1) ** (n + 1) * factorial(n - 1)


def test_cycle_n2_size():
    assert 0 < len(cycle_cn(2)) <= 10


@pytest.mark.parametrize("n", [2, 3, 4])
def test_whistle_blower_shape(n):
    x = x_monomial(n)
    w = whistle_blower(n)
    m = corolla(Alphabet(n))
    assert graft(m, n, x) == (w, 1)
    assert epsilon(x) == (-1) ** (n + 1) * factorial(n - 1)
    assert nu(n).coefficient(x.code) == epsilon(x)


def test_whistle_blower_n3():
    assert str(whistle_blower(3)) == "m(,,x(m(,,),m(,,),,,))"


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_no_preimage_for_whistle_blower(n):
    assert boundary_preimage_monomials(whistle_blower(n)) == []


def test_preimages():
    # a degree-1 monomial with a mu-mu edge under a fat vertex does have preimages
    w = from_nested("x(m(m(,),),,)", 2)
    pre = boundary_preimage_monomials(w)
    assert pre and all(t.degree == 2 for t in pre)
    assert all(differential_monomial(t).coefficient(w.code) != 0 for t in pre)
    assert boundary_preimage_monomials(mu_comb(2)) == []


def test_preimage_list_is_complete():
    w = from_nested("x(m(m(,),),,)", 2)
    a = w.alphabet
    brute = [t for t in enumerate_trees(a, {XI: 2}) if differential_monomial(t).coefficient(w.code)]
    assert boundary_preimage_monomials(w) == sorted(brute)


@pytest.mark.parametrize("n", [2, 3])
def test_cycle_is_not_a_boundary(n):
    q = is_boundary(cycle_cn(n))
    assert not q.solvable and q.rank_augmented == q.rank + 1
    assert q.witness is None


def test_is_boundary_zero():
    q = is_boundary(TreePolynomial(Alphabet(2)))
    assert q.solvable and q.witness.is_zero()


@settings(max_examples=30)
@given(st.integers(2, 3), st.integers(0, 2), st.data())
def test_is_boundary_finds_witness(n, mus, data):
    trees = enumerate_trees(Alphabet(n), {MU: mus, XI: 2})
    y = data.draw(st.sampled_from(trees))
    k = data.draw(st.integers(-3, 3).filter(bool))
    q = differential_monomial(y).scale(k)
    res = is_boundary(q)
    assert res.solvable
    assert differential(res.witness) == q


def test_is_boundary_rejects_bad_targets():
    with pytest.raises(ValueError):
        is_boundary(TreePolynomial.from_monomial(mu_comb(2)))
    mixed = TreePolynomial.from_monomial(corolla(Alphabet(2), XI)) + TreePolynomial.from_monomial(
        from_nested("x(,m(,),)", 2))
    with pytest.raises(ValueError):
        is_boundary(mixed)


def test_slice_budget():
    with pytest.raises(BudgetExceeded):
        degree_slice(Alphabet(3), 7, 2, budget=5)
    assert degree_slice(Alphabet(3), 3, 2) == []


def test_nu_budget():
    with pytest.raises(BudgetExceeded):
        nu(4, budget=10)
