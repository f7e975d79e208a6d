import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from affine_semigroup.affine_core import SystemParams, compose
from affine_semigroup.measures import GridMeasure, PointMassMeasure, kolmogorov_distance
from affine_semigroup.shift_measures import ShiftMeasure
from affine_semigroup.skew_dynamics import path_average
from affine_semigroup.stationary_solver import (MomentDivergenceError, PositiveLyapunovError,
                                                fixed_point_residual, holder_certificate, holder_constants,
                                                moment_oracle, quantile_map, rotation_number,
                                                rotation_number_numeric, solve_stationary, tp_pushforward)
from affine_semigroup.verify import grid_mass_widened


def test_pushforward_of_dirac(p_half_5_4):
    out = tp_pushforward(PointMassMeasure.delta(2.0), 0.6, p_half_5_4)
    assert list(out.x) == [1.0, 3.5] and list(out.weights) == pytest.approx([0.6, 0.4])


def test_pushforward_of_uniform(p_half_5_4):
    # N divisible by 3 puts x = 0.5 (u = 2/3) on a node, where the update is exact
    g = GridMeasure.from_cdf(lambda x: np.clip(x, 0.0, 1.0), 3 * 2 ** 10)
    out = tp_pushforward(g, 0.6, p_half_5_4)
    assert out.cdf(0.5) == pytest.approx(0.6, abs=1e-12)
    # away from nodes the error is the linear-in-u interpolation of a kinked CDF
    assert out.cdf(0.3) == pytest.approx(0.6 * 0.6, abs=1e-3)


def test_fixed_point_is_kept(mu_main, p_half_5_4):
    assert kolmogorov_distance(mu_main, tp_pushforward(mu_main, 0.6, p_half_5_4)) <= 1e-6
    assert fixed_point_residual(mu_main, 0.6, p_half_5_4) <= 1e-6


def test_moments_against_oracle(mu_main, p_half_5_4):
    assert moment_oracle(0.6, p_half_5_4, 1) == pytest.approx(2.0)
    assert moment_oracle(0.6, p_half_5_4, 2) == pytest.approx(32 / 3)
    assert abs(mu_main.mean() - 2.0) <= 0.01
    assert abs(mu_main.moment(2) - 32 / 3) <= 0.1


def test_oracle_divergence(p_half_3_2):
    with pytest.raises(MomentDivergenceError):
        moment_oracle(0.5, p_half_3_2, 1)


def test_solver_matches_path_average(mu_main, p_half_5_4):
    pa = path_average(ShiftMeasure.bernoulli(0.6), 1.0, 10 ** 6, 9, p_half_5_4)
    assert abs(pa.mean() - mu_main.mean()) <= 0.01 * mu_main.mean()


def test_solver_refuses_positive_lyapunov():
    with pytest.raises(PositiveLyapunovError):
        solve_stationary(0.5, SystemParams.create("1/2", "3"), N=256)


def test_quantile_map(mu_main):
    assert quantile_map(mu_main, 0.0) == pytest.approx(0.0, abs=1e-12)
    s = np.linspace(0.0, 0.999, 500)
    h = quantile_map(mu_main, s)
    assert np.all(np.diff(h) > 0)
    # push 1e5 uniforms through H: the sample law is mu up to sampling noise and grid cells
    samples = quantile_map(mu_main, np.random.default_rng(3).random(10 ** 5))
    dkw = math.sqrt(math.log(2 / 1e-6) / (2 * 10 ** 5))
    assert kolmogorov_distance(PointMassMeasure(samples), mu_main) <= dkw + 2.0 / mu_main.N


def test_holder_constants_examples(p_half_3_2):
    c = holder_constants(1.0, 0.1, 0.5, p_half_3_2)
    assert c.c5 == pytest.approx(math.log(2) ** 2 / math.log(1.5) ** 2, rel=1e-12)
    assert c.c5 == pytest.approx(-math.log(c.q) * c.c2)
    assert c.k_bound < 1 + 1e-15 and holder_constants(2.0, 0.1, 0.5, p_half_3_2).k_bound == 1.0


def test_certificate_example(p_half_3_2, mu_heavy):
    cert = holder_certificate(9.95, 10.05, 0.5, p_half_3_2)
    amap = compose(cert.word, p_half_3_2, exact=True)
    for end in (0, 2):
        assert 9.95 <= amap(end) <= 10.05
    assert cert.length_bound_holds()
    lower = cert.measure_lower_bound(float(mu_heavy.cdf(2.0)))
    assert grid_mass_widened(mu_heavy, 9.95, 10.05) >= lower


def test_certificate_degenerate_interval(p_half_3_2):
    cert = holder_certificate(0.0, 4.0, 0.5, p_half_3_2)
    assert cert.k == 0 and cert.m == 0 and len(cert.word) == 0 and cert.inclusion_holds()


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 50.0), st.floats(-4.0, 0.0))
def test_certificate_soundness(center, log_len):
    params = SystemParams.create("1/2", "3/2")
    L = min(10.0 ** log_len, center)
    cert = holder_certificate(center - L / 2, center + L / 2, 0.5, params)
    assert cert.inclusion_holds()
    assert cert.length_bound_holds()
    assert len(cert.word) == cert.k + cert.m


def test_rotation_examples():
    p = SystemParams.create("1/2", "3/2")
    assert rotation_number(p) == pytest.approx(math.log(4 / 3) / math.log(2))
    for a, b in (("1/2", "3/2"), ("1/3", "5/4"), ("0.7", "1.1")):
        q = SystemParams.create(a, b)
        assert 0 < rotation_number(q) < 1
        assert abs(rotation_number(q) - rotation_number_numeric(q, 10 ** 6)) <= 1e-5
