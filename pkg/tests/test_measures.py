import numpy as np
import pytest
from hypothesis import given, strategies as st

from affine_semigroup.measures import (GridMeasure, PiecewiseLinearCDF, PointMassMeasure, TruncatedExponential,
                                       from_u, kolmogorov_distance, to_u)

atoms = st.lists(st.floats(0, 1e6, allow_nan=False), min_size=1, max_size=30)


def test_u_coordinate():
    assert to_u(0.0) == 1.0 and to_u(np.inf) == 0.0 and to_u(1.0) == 0.5
    assert from_u(0.0) == np.inf and from_u(0.25) == 3.0


def test_kolmogorov_examples():
    m = PointMassMeasure([1.0, 2.0], [0.5, 0.5])
    assert kolmogorov_distance(m, m) == 0.0
    assert kolmogorov_distance(PointMassMeasure.delta(0.0), PointMassMeasure.delta(np.inf)) == 1.0
    assert kolmogorov_distance(PointMassMeasure.delta(1.0), PointMassMeasure([1.0, 3.0])) == 0.5


@given(atoms, atoms, atoms)
def test_kolmogorov_is_a_metric(x, y, z):
    a, b, c = PointMassMeasure(x), PointMassMeasure(y), PointMassMeasure(z)
    ab = kolmogorov_distance(a, b)
    assert 0.0 <= ab <= 1.0
    assert ab == kolmogorov_distance(b, a)
    assert ab <= kolmogorov_distance(a, c) + kolmogorov_distance(c, b) + 1e-12


def test_point_mass_basics():
    m = PointMassMeasure([0.0, 1.0, 1.0, np.inf], [0.1, 0.2, 0.3, 0.4])
    assert m.cdf(1.0) == pytest.approx(0.6) and m.cdf_left(1.0) == pytest.approx(0.1)
    assert m.mass(1.0, 1.0) == pytest.approx(0.5)
    assert m.mass_at_infinity == pytest.approx(0.4)
    assert m.mean() == np.inf
    with pytest.raises(ValueError):
        PointMassMeasure([1.0], [0.5])
    with pytest.raises(ValueError):
        PointMassMeasure([-1.0])


def test_grid_measure_from_points_matches_cdf():
    pts = PointMassMeasure([0.5, 2.0, 7.0])
    g = GridMeasure.from_points(pts, 1024)
    assert g.total_mass() == pytest.approx(1.0)
    assert kolmogorov_distance(g, pts) <= 1.0 / 3 + 1e-12
    # a Dirac mass on the grid is spread over at most one cell
    d = GridMeasure.delta(1.0, 1024)
    assert np.count_nonzero(d.cell_masses()) <= 1
    assert d.mean() == pytest.approx(1.0, abs=2e-3)


def test_grid_mass_at_infinity():
    g = GridMeasure.from_cdf(lambda x: 0.7 * (x >= 2.0), 64, mass_at_infinity=0.3)
    assert g.cdf(np.inf) == 1.0 and g.cdf_left(np.inf) == pytest.approx(0.7)
    assert g.mean() == np.inf


def test_piecewise_linear_cdf():
    m = PiecewiseLinearCDF([0.0, 1.0, 3.0], [0.5, 0.5])
    assert m.cdf(0.5) == pytest.approx(0.25) and m.cdf(2.0) == pytest.approx(0.75)
    assert m.mean() == pytest.approx(0.25 + 1.0)
    assert kolmogorov_distance(m, PointMassMeasure.delta(1.0)) == pytest.approx(0.5)


def test_truncated_exponential():
    t = TruncatedExponential(1.0, 10.0)
    assert t.cdf(0.0) == 0.0 and t.cdf(10.0) == pytest.approx(1.0) and t.cdf(np.inf) == 1.0
    s = t.sample(np.random.default_rng(1), 20000)
    assert s.max() <= 10.0
    assert kolmogorov_distance(PointMassMeasure(s), t) < 0.015
