"""Probability measures on the compactified half-line [0, inf] and their CDF distance.

Three concrete representations share one small protocol::

    cdf(x)        mu([0, x])   (vectorized, x may be inf)
    cdf_left(x)   mu([0, x))
    breakpoints() x-locations where the CDF may jump or change its formula

The compactified coordinate is u = 1/(1 + x), with u = 0 standing for infinity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_MASS_TOL = 1e-12


def to_u(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore"):
        return np.where(np.isinf(x), 0.0, 1.0 / (1.0 + np.where(np.isinf(x), 0.0, x)))


def from_u(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(u <= 0.0, np.inf, 1.0 / np.where(u <= 0.0, 1.0, u) - 1.0)


class PointMassMeasure:
    """Finite weighted sum of Dirac masses; locations kept in natural coordinates.

    ``x`` may contain ``inf``.  ``u`` gives the same locations in [0, 1].
    """

    def __init__(self, x, weights=None, normalize_tol: float = _MASS_TOL):
        x = np.asarray(x, dtype=float).ravel()
        if weights is None:
            weights = np.full(x.size, 1.0 / max(x.size, 1))
        weights = np.asarray(weights, dtype=float).ravel()
        if x.shape != weights.shape:
            raise ValueError("locations and weights differ in length")
        if x.size == 0:
            raise ValueError("empty point-mass measure")
        if np.any(weights < 0) or np.any(np.isnan(x)) or np.any(x < 0):
            raise ValueError("weights must be nonnegative and locations in [0, inf]")
        total = weights.sum()
        if normalize_tol is not None and abs(total - 1.0) > normalize_tol:
            raise ValueError(f"weights sum to {total!r}, not 1")
        self.x = x
        self.weights = weights
        self._sorted = None

    @classmethod
    def delta(cls, x: float) -> "PointMassMeasure":
        return cls([x], [1.0])

    @property
    def u(self) -> np.ndarray:
        return to_u(self.x)

    def __len__(self) -> int:
        return self.x.size

    def _cum(self):
        if self._sorted is None:
            order = np.argsort(self.x, kind="stable")
            xs = self.x[order]
            cw = np.cumsum(self.weights[order])
            # collapse ties so every location carries its full mass
            last = np.r_[xs[1:] != xs[:-1], True]
            self._sorted = (xs[last], cw[last])
        return self._sorted

    def cdf(self, x) -> np.ndarray:
        xs, cw = self._cum()
        idx = np.searchsorted(xs, np.asarray(x, dtype=float), side="right")
        return np.where(idx > 0, cw[np.maximum(idx - 1, 0)], 0.0)

    def cdf_left(self, x) -> np.ndarray:
        xs, cw = self._cum()
        idx = np.searchsorted(xs, np.asarray(x, dtype=float), side="left")
        return np.where(idx > 0, cw[np.maximum(idx - 1, 0)], 0.0)

    def breakpoints(self) -> np.ndarray:
        return self._cum()[0]

    def mass(self, lo: float, hi: float) -> float:
        """mu([lo, hi])."""
        return float(self.cdf(hi) - self.cdf_left(lo))

    def expect(self, f) -> float:
        finite = np.isfinite(self.x)
        if not finite.all() and np.any(self.weights[~finite] > 0):
            return float("inf")
        return float(np.dot(self.weights[finite], f(self.x[finite])))

    def moment(self, k: int) -> float:
        return self.expect(lambda v: v ** k)

    def mean(self) -> float:
        return self.moment(1)

    @property
    def mass_at_infinity(self) -> float:
        return float(self.weights[np.isinf(self.x)].sum())


@dataclass
class GridMeasure:
    """CDF sampled at the uniform u-grid u_j = j/N, j = 0..N.

    ``cdf_nodes[j]`` is mu([0, x_j]) with x_j = 1/u_j - 1, so it decreases with j;
    at j = 0 (x = inf) it equals 1 - mass_at_infinity and at j = N it is mu({0}).
    Between nodes the CDF is linear in u.
    """

    cdf_nodes: np.ndarray
    mass_at_infinity: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.cdf_nodes = np.asarray(self.cdf_nodes, dtype=float)
        if self.cdf_nodes.ndim != 1 or self.cdf_nodes.size < 3:
            raise ValueError("need at least two grid cells")

    @property
    def N(self) -> int:
        return self.cdf_nodes.size - 1

    @property
    def u_nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.N + 1)

    @property
    def x_nodes(self) -> np.ndarray:
        return from_u(self.u_nodes)

    @classmethod
    def from_cdf(cls, F, N: int, mass_at_infinity: float = 0.0) -> "GridMeasure":
        """Sample a callable x -> mu([0, x]) on the grid (F(inf) means mu([0, inf)))."""
        x = from_u(np.linspace(0.0, 1.0, N + 1))
        vals = np.asarray(F(x), dtype=float)
        vals[0] = 1.0 - mass_at_infinity
        return cls(vals, mass_at_infinity)

    @classmethod
    def delta(cls, x0: float, N: int) -> "GridMeasure":
        """Dirac mass at ``x0`` as seen by the grid (spread over at most one cell)."""
        return cls.from_cdf(lambda x: (x >= x0).astype(float), N)

    @classmethod
    def from_points(cls, m: PointMassMeasure, N: int) -> "GridMeasure":
        vals = m.cdf(from_u(np.linspace(0.0, 1.0, N + 1)))
        vals[0] = 1.0 - m.mass_at_infinity
        return cls(vals, m.mass_at_infinity)

    def cdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        vals = np.interp(to_u(x), self.u_nodes, self.cdf_nodes)
        return np.where(np.isinf(x), 1.0, np.where(x < 0, 0.0, vals))

    def cdf_left(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        vals = np.interp(to_u(x), self.u_nodes, self.cdf_nodes)
        vals = np.where(np.isinf(x), 1.0 - self.mass_at_infinity, vals)
        return np.where(x <= 0, 0.0, vals)

    def breakpoints(self) -> np.ndarray:
        return self.x_nodes[::-1]

    def mass(self, lo: float, hi: float) -> float:
        return float(self.cdf(hi) - self.cdf_left(lo))

    def cell_masses(self) -> np.ndarray:
        """Mass of each u-cell [u_j, u_{j+1}), j = 0..N-1 (x decreasing with j)."""
        return self.cdf_nodes[:-1] - self.cdf_nodes[1:]

    def expect(self, f) -> float:
        """Integral of f, with each u-cell's mass placed at the cell's u-midpoint.

        The atom at x = 0 (if any) is included; mass at infinity makes the result
        infinite unless it is zero.
        """
        if self.mass_at_infinity > 0:
            return float("inf")
        u = self.u_nodes
        x_mid = from_u(0.5 * (u[:-1] + u[1:]))
        total = float(np.dot(self.cell_masses(), f(x_mid)))
        return total + float(self.cdf_nodes[-1] * f(np.zeros(1))[0])

    def moment(self, k: int) -> float:
        return self.expect(lambda v: v ** k)

    def mean(self) -> float:
        return self.moment(1)

    def total_mass(self) -> float:
        return float(self.cdf_nodes[0] + self.mass_at_infinity)


class PiecewiseLinearCDF:
    """Measure with CDF linear in x between ``edges`` (e.g. Ulam bin histograms)."""

    def __init__(self, edges, masses):
        self.edges = np.asarray(edges, dtype=float)
        masses = np.asarray(masses, dtype=float)
        if self.edges.size != masses.size + 1:
            raise ValueError("need one more edge than masses")
        self.masses = masses
        self.cum = np.concatenate(([0.0], np.cumsum(masses)))

    def cdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.interp(x, self.edges, self.cum, left=0.0, right=self.cum[-1])

    cdf_left = cdf

    def breakpoints(self) -> np.ndarray:
        return self.edges

    def mass(self, lo: float, hi: float) -> float:
        return float(self.cdf(hi) - self.cdf(lo))

    def expect(self, f, points_per_bin: int = 8) -> float:
        # midpoint rule inside each bin (density is constant there)
        t = (np.arange(points_per_bin) + 0.5) / points_per_bin
        left, width = self.edges[:-1], np.diff(self.edges)
        pts = left[:, None] + width[:, None] * t[None, :]
        return float(np.dot(self.masses, f(pts).mean(axis=1)))

    def mean(self) -> float:
        return self.expect(lambda v: v)


def kolmogorov_distance(m1, m2) -> float:
    """sup over [0, inf] of |F1 - F2|, including left limits at every breakpoint.

    The supremum is invariant under the monotone change of variable u = 1/(1+x),
    so this is the same number as the sup-distance of the CDFs in u.  It is exact
    for point-mass measures and for CDFs that are linear in a common coordinate
    between breakpoints; otherwise it is evaluated on the merged breakpoint set.
    """
    pts = np.union1d(m1.breakpoints(), m2.breakpoints())
    pts = np.append(pts, np.inf) if not np.isinf(pts[-1]) else pts
    right = np.abs(m1.cdf(pts) - m2.cdf(pts))
    left = np.abs(m1.cdf_left(pts) - m2.cdf_left(pts))
    return float(max(right.max(), left.max()))


class AnalyticCDF:
    """Continuous CDF given by a vectorized callable (no atoms, no breakpoints).

    Paired with a point-mass measure in ``kolmogorov_distance`` the supremum is
    attained at the atoms, so the distance is exact.
    """

    def __init__(self, fn):
        self.fn = fn

    def cdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.where(np.isinf(x), 1.0, self.fn(np.where(np.isinf(x), 0.0, x)))

    cdf_left = cdf

    def breakpoints(self) -> np.ndarray:
        return np.array([0.0])


class TruncatedExponential(AnalyticCDF):
    """Exp(rate) conditioned on [0, upper]."""

    def __init__(self, rate: float = 1.0, upper: float = 10.0):
        self.rate, self.upper = rate, upper
        z = -np.expm1(-rate * upper)
        super().__init__(lambda x: np.clip(-np.expm1(-rate * np.clip(x, 0.0, upper)) / z, 0.0, 1.0))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        # inverse CDF of the truncated law
        z = -np.expm1(-self.rate * self.upper)
        return -np.log1p(-rng.random(size) * z) / self.rate
