from __future__ import annotations

from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from koszulab.hypergeom import a_closed
from koszulab.series import (
    TruncatedSeries,
    compose,
    detect_gap,
    first_nonzero,
    format_series,
    gk_residual,
    inverse_of_trinomial,
    lagrange_invert,
    minimal_model_generators,
    newton_invert,
    parse_series_text,
    read_series,
    scan_negative,
    series_to_text,
    write_series,
)

N8 = {1: 1, 8: 1, 15: 7, 22: 69, 29: 790, 36: 9842}

small_fracs = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def series_strategy(order: int, invertible: bool = False):
    lead = small_fracs.filter(bool) if invertible else small_fracs
    return st.tuples(lead, st.lists(small_fracs, min_size=order - 1, max_size=order - 1)).map(
        lambda p: TruncatedSeries([0, p[0], *p[1]], order)
    )


def trinomial(n: int, order: int) -> TruncatedSeries:
    return TruncatedSeries.from_terms({1: 1, n: -1, 2 * n - 1: 1}, order)


def test_basic_arithmetic():
    t = TruncatedSeries.t(6)
    s = t + t * t
    assert s * s == TruncatedSeries([0, 0, 1, 2, 1], 6)
    assert (s - s).valuation() is None
    one_minus = TruncatedSeries([1, -1], 6)
    assert one_minus.reciprocal() == TruncatedSeries([1] * 7, 6)
    assert (t / one_minus)[6] == 1
    assert s.derivative() == TruncatedSeries([1, 2], 5)
    assert format_series(TruncatedSeries.from_terms({1: 1, 3: -1, 5: 3}, 5)) == "t - t^3 + 3*t^5"


def test_compose_examples():
    g = TruncatedSeries.from_terms({2: 1}, 8)
    f = TruncatedSeries.from_terms({1: 1, 2: 1}, 8)
    assert compose(g, f) == TruncatedSeries.from_terms({2: 1, 3: 2, 4: 1}, 8)
    with pytest.raises(ValueError):
        compose(g, TruncatedSeries([1, 1], 8))


@settings(max_examples=40)
@given(series_strategy(12), series_strategy(12), series_strategy(12))
def test_compose_associative(a, b, c):
    assert compose(compose(a, b), c) == compose(a, compose(b, c))


def test_inverse_examples():
    catalan = TruncatedSeries.from_terms({1: 1, 2: 1, 3: 2, 4: 5, 5: 14}, 5)
    f = TruncatedSeries.from_terms({1: 1, 2: -1}, 5)
    assert lagrange_invert(f) == catalan == newton_invert(f)
    t = TruncatedSeries.t(10)
    assert lagrange_invert(t) == t == newton_invert(t)
    g = TruncatedSeries.from_terms({1: 1, 3: 1}, 9)
    inv = newton_invert(g)
    assert [inv[k] for k in (1, 3, 5, 7)] == [1, -1, 3, -12]
    assert compose(g, inv) == TruncatedSeries.t(9)


def test_inverse_n8_coefficients():
    h = lagrange_invert(trinomial(8, 36))
    assert h[15] == 7 and h[22] == 69
    assert all(h[7 * w + 1] == a_closed(w) for w in range(6))


def test_inverse_errors():
    with pytest.raises(ValueError):
        lagrange_invert(TruncatedSeries([0, 0, 1], 5))
    with pytest.raises(ValueError):
        newton_invert(TruncatedSeries([1, 1], 5))


@settings(max_examples=20)
@given(series_strategy(60, invertible=True))
def test_lagrange_equals_newton(f):
    # the 100-series run lives in the acceptance suite
    assert lagrange_invert(f) == newton_invert(f)


@settings(max_examples=30)
@given(series_strategy(25, invertible=True))
def test_inverse_both_sides(f):
    inv = lagrange_invert(f)
    t = TruncatedSeries.t(25)
    assert compose(f, inv) == t and compose(inv, f) == t


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_trinomial_inverse_support(n):
    h = inverse_of_trinomial(n, 120)
    assert all((e - 1) % (n - 1) == 0 for e in h.terms())
    assert compose(trinomial(n, 120), h) == TruncatedSeries.t(120)


def test_gk_residual_examples():
    N = 20
    t = TruncatedSeries.t(N)
    ass = TruncatedSeries([0] + [1] * N, N)
    dual = TruncatedSeries([0] + [(-1) ** (k + 1) for k in range(1, N + 1)], N)
    assert gk_residual(ass, dual).valuation() is None
    assert gk_residual(t, t).valuation() is None
    gP = TruncatedSeries.from_terms(N8, 36)
    assert gk_residual(gP, trinomial(8, 36)).valuation() is None
    wrong = TruncatedSeries.from_terms({**N8, 29: 791}, 36)
    assert first_nonzero(gk_residual(wrong, trinomial(8, 36))) == 29


def test_minimal_model_generators():
    N = 15
    free_binary = TruncatedSeries([0] + [comb(2 * k - 2, k - 1) // k for k in range(1, N + 1)], N)
    assert minimal_model_generators(free_binary) == TruncatedSeries.from_terms({2: 1}, N)
    assert minimal_model_generators(TruncatedSeries.t(N)).valuation() is None
    gE = minimal_model_generators(TruncatedSeries.from_terms(N8, 36))
    assert gE.terms() == {8: 1, 15: -1}


def test_detect_gap_examples():
    gE = minimal_model_generators(TruncatedSeries.from_terms(N8, 36))
    rep = detect_gap(gE, 8)
    assert rep.q == 3 and rep.d == 3 and rep.truncated and not rep.nonzero_after
    assert rep.certified_zero_weights == [3]
    assert rep.has_gap
    dense = detect_gap(TruncatedSeries([0, 1, 1, 1, 1, 1], 5), 2)
    assert dense.q is None and not dense.has_gap
    # weights 1..4 carry 1, 1, 0, 1 for n = 2 (arity p + 1)
    rep = detect_gap(TruncatedSeries([0, 0, 1, 1, 0, 1], 5), 2)
    assert (rep.q, rep.d, rep.nonzero_after) == (3, 1, True)


def test_detect_gap_rejects_bad_support():
    with pytest.raises(ValueError):
        detect_gap(TruncatedSeries.from_terms({1: 1, 4: 1}, 10), 3)


def test_scan_negative_examples():
    assert scan_negative(TruncatedSeries.from_terms({1: 1, 2: -1}, 4)) == 2
    assert scan_negative(TruncatedSeries.t(4)) is None
    h = lagrange_invert(TruncatedSeries.from_terms({1: 1, 2: -1, 3: 1}, 50))
    assert scan_negative(h) is not None and scan_negative(h) <= 50
    assert scan_negative(inverse_of_trinomial(8, 350)) is None


def test_series_io(tmp_path):
    f = TruncatedSeries.from_terms({1: 1, 8: Fraction(-3, 7), 15: 7}, 20)
    text = series_to_text(f)
    assert parse_series_text(text, 20) == f
    p = tmp_path / "g.txt"
    write_series(f, p)
    assert read_series(p, 20) == f
    assert parse_series_text("# comment\n1 1\n\n3 -1/2  # trailing\n", 3)[3] == Fraction(-1, 2)
    for bad in ("1", "x 1", "-1 2", "1 1/0"):
        with pytest.raises((ValueError, ZeroDivisionError)):
            parse_series_text(bad, 5)
