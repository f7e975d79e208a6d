import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from affine_semigroup.affine_core import SystemParams, Word
from affine_semigroup.shift_measures import (ShiftMeasure, cylinder_mass, lyapunov, sample_path,
                                             sample_symbols)

MARKOV = ShiftMeasure.markov([[0.9, 0.1], [0.2, 0.8]])
words = st.lists(st.integers(0, 1), max_size=20).map(Word.from_symbols)


def test_cylinder_examples():
    assert cylinder_mass(ShiftMeasure.bernoulli(0.6), Word.from_str("01")) == pytest.approx(0.24)
    assert cylinder_mass(MARKOV, Word()) == 1.0
    assert cylinder_mass(MARKOV, Word.from_str("001")) == pytest.approx(0.06)
    assert MARKOV.pi == pytest.approx((2 / 3, 1 / 3))


def test_markov_rejects_bad_input():
    with pytest.raises(ValueError):
        ShiftMeasure.markov([[0.9, 0.2], [0.2, 0.8]])
    with pytest.raises(ValueError):
        ShiftMeasure.markov([[0.9, 0.1], [0.2, 0.8]], pi=(0.5, 0.5))
    with pytest.raises(ValueError):
        ShiftMeasure.bernoulli(1.0)


def test_roundtrip_dict():
    for nu in (ShiftMeasure.bernoulli(0.3), MARKOV):
        assert ShiftMeasure.from_dict(nu.to_dict()) == nu


@given(words)
def test_kolmogorov_consistency(w):
    nu = ShiftMeasure.bernoulli(0.5)
    assert cylinder_mass(nu, w) == cylinder_mass(nu, w + Word.from_str("0")) + cylinder_mass(nu, w + Word.from_str("1"))
    ext = cylinder_mass(MARKOV, w + Word.from_str("0")) + cylinder_mass(MARKOV, w + Word.from_str("1"))
    assert abs(cylinder_mass(MARKOV, w) - ext) <= 1e-12


def test_lyapunov_examples():
    half = ShiftMeasure.bernoulli(0.5)
    assert lyapunov(half, SystemParams.create("1/2", "3/2")) == pytest.approx(0.5 * math.log(0.75))
    assert lyapunov(ShiftMeasure.bernoulli(0.6), SystemParams.create("1/2", "5/4")) == pytest.approx(-0.32664, abs=1e-5)
    assert lyapunov(half, SystemParams.create("1/2", "3")) > 0


def test_sampling():
    assert sample_path(ShiftMeasure.bernoulli(0.5), 0, 1) == Word()
    s = sample_symbols(ShiftMeasure.bernoulli(0.5), 10 ** 6, 3)
    assert abs((s == 0).mean() - 0.5) <= 0.002
    # p is the probability of symbol 0
    assert abs((sample_symbols(ShiftMeasure.bernoulli(0.9), 10 ** 5, 3) == 0).mean() - 0.9) < 0.01


def test_sampling_is_deterministic_and_stream_separated():
    a = sample_symbols(MARKOV, 5000, 7, 1)
    assert np.array_equal(a, sample_symbols(MARKOV, 5000, 7, 1))
    assert not np.array_equal(a, sample_symbols(MARKOV, 5000, 7, 2))


def test_markov_sample_statistics():
    s = sample_symbols(MARKOV, 10 ** 6, 11).astype(int)
    assert abs((s == 0).mean() - 2 / 3) < 0.01
    after0 = s[1:][s[:-1] == 0]
    after1 = s[1:][s[:-1] == 1]
    assert abs(after0.mean() - 0.1) < 0.005
    assert abs(1 - after1.mean() - 0.2) < 0.005
