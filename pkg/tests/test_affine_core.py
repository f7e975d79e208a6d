from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from affine_semigroup.affine_core import (IDENTITY, AffineMap, SystemParams, Word, apply, coincidence_search,
                                          compose, mr33_check, parse_real, word_derivative, zeros)

words = st.lists(st.integers(0, 1), max_size=40).map(Word.from_symbols)


def test_parse_real_forms():
    assert parse_real("4/3") == Fraction(4, 3)
    assert parse_real("0.5") == 0.5 and isinstance(parse_real("0.5"), float)
    assert parse_real(Fraction(1, 2)) == Fraction(1, 2)


def test_params_validation():
    with pytest.raises(ValueError):
        SystemParams.create(1.2, 2)
    with pytest.raises(ValueError):
        SystemParams.create("1/2", "1")
    assert SystemParams.create("1/2", "3/2").exact
    assert not SystemParams.create(0.5, 1.5).exact


def test_word_roundtrip_and_order():
    w = Word.from_str("00110")
    assert str(w) == "00110" and len(w) == 5 and w.ones() == 2
    assert list(w) == [0, 0, 1, 1, 0] and w[2] == 1 and w[-1] == 0
    assert str(w.reversed()) == "01100"
    assert str(Word.from_str("01") + Word.from_str("1")) == "011"
    assert sorted([Word.from_str(s) for s in ("10", "1", "00", "")], key=Word.sort_key) == \
        [Word.from_str(s) for s in ("", "1", "00", "10")]
    with pytest.raises(ValueError):
        Word.from_str("012")


def test_compose_examples(p_half_3_2):
    assert compose(Word(), p_half_3_2) == AffineMap(1, 0)
    assert compose(Word.from_str("1"), p_half_3_2) == AffineMap(Fraction(3, 2), 1)
    p = SystemParams.create("1/2", "4/3")
    m = AffineMap(Fraction(2, 9), Fraction(7, 6))
    assert compose(Word.from_str("10001"), p) == m
    assert compose(Word.from_str("00110"), p) == m


def test_apply_examples():
    assert apply(IDENTITY, 5) == 5
    assert apply(AffineMap(Fraction(3, 2), 1), 0) == 1
    assert apply(AffineMap(Fraction(2, 9), Fraction(7, 6)), 3) == Fraction(11, 6)
    assert apply(AffineMap(0.5, 1.0), float("inf")) == float("inf")


def test_word_derivative_examples(p_half_3_2):
    assert word_derivative(Word(), p_half_3_2) == 1
    assert word_derivative(Word.from_str("01"), p_half_3_2) == Fraction(3, 4)
    assert word_derivative(Word.from_str("10001"), SystemParams.create("1/2", "4/3")) == Fraction(2, 9)


@given(words, words)
def test_homomorphism_exact(u, v):
    p = SystemParams.create("1/2", "3/2")
    assert compose(u + v, p) == compose(u, p).then(compose(v, p))


@given(words, words)
def test_homomorphism_float(u, v):
    p = SystemParams.create(0.37, 1.9)
    lhs, rhs = compose(u + v, p), compose(u, p).then(compose(v, p))
    assert lhs.slope == pytest.approx(rhs.slope, rel=1e-12)
    assert lhs.intercept == pytest.approx(rhs.intercept, rel=1e-12, abs=1e-300)


@given(words)
def test_slope_law(w):
    p = SystemParams.create("1/2", "3/2")
    assert compose(w, p).slope == word_derivative(w, p)


def test_mr33_examples(p_half_3_2):
    assert mr33_check(zeros(12), 3.0, 10.0, p_half_3_2).holds
    assert mr33_check(Word.from_str("110101"), 0.0, 10.0, p_half_3_2).holds
    rep = mr33_check(Word.from_str("010010100100"), 1.0, 10.0, p_half_3_2)
    assert rep.precondition_ok and rep.holds
    out = mr33_check(Word.from_str("1111111111"), 1.0, 10.0, p_half_3_2)
    assert out.holds is None and out.violation_prefix is not None


def test_coincidence_examples():
    classes = coincidence_search(5, SystemParams.create("1/2", "4/3"))
    assert len(classes) == 1
    assert [str(w) for w in classes[0].words] == ["00110", "10001"]
    assert (classes[0].slope, classes[0].intercept) == (Fraction(2, 9), Fraction(7, 6))
    assert coincidence_search(8, SystemParams.create("1/2", "3/2")) == []
    assert coincidence_search(1, SystemParams.create("1/3", "7/5")) == []


def test_coincidence_requires_exact():
    with pytest.raises(ValueError):
        coincidence_search(3, SystemParams.create(0.5, 1.5))
    with pytest.raises(ValueError):
        coincidence_search(3, SystemParams.create("1/2", "3/2"), exact=False)


@settings(max_examples=5, deadline=None)
@given(st.integers(1, 6))
def test_coincidence_parallel_matches(n):
    p = SystemParams.create("1/2", "4/3")
    seq = coincidence_search(n, p)
    par = coincidence_search(n, p, workers=2)
    assert [c.to_dict() for c in seq] == [c.to_dict() for c in par]
