"""Fibre orbits of the skew product (w, x) -> (shift w, T_{w_0} x)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .affine_core import SystemParams, Word
from .measures import PointMassMeasure
from .shift_measures import ShiftMeasure, sample_symbols

OVERFLOW = 1e300
INFINITY = math.inf


@dataclass
class Orbit:
    points: np.ndarray
    overflow_step: int | None = None  # first index promoted to INFINITY

    @property
    def overflowed(self) -> bool:
        return self.overflow_step is not None


def orbit_of_symbols(symbols: np.ndarray, x0: float, params: SystemParams) -> Orbit:
    a, b = params.a, params.b
    n = len(symbols)
    out = [0.0] * (n + 1)
    x = float(x0)
    out[0] = x
    overflow_step = 0 if x == INFINITY else None
    i = 0
    for i, s in enumerate(symbols.tolist(), start=1):
        if x == INFINITY:
            break
        x = b * x + 1.0 if s else a * x
        if x > OVERFLOW:
            x = INFINITY
            overflow_step = i
        out[i] = x
    else:
        return Orbit(np.array(out), overflow_step)
    # absorbed at infinity before the end of the word
    pts = np.array(out)
    pts[i:] = INFINITY
    return Orbit(pts, overflow_step)


def path_orbit(word: Word, x0: float, params: SystemParams) -> Orbit:
    """(x_0, ..., x_n) with x_{k+1} = T_{w_k}(x_k); values above 1e300 become inf."""
    return orbit_of_symbols(word.symbols(), x0, params)


def path_average(nu: ShiftMeasure, x0: float, n: int, seed: int, params: SystemParams,
                 stream: int = 0) -> PointMassMeasure:
    """Uniform empirical measure of x_0, ..., x_{n-1} along one nu-random path."""
    if n < 1:
        raise ValueError("n must be at least 1")
    symbols = sample_symbols(nu, n - 1, seed, stream)
    orbit = orbit_of_symbols(symbols, x0, params)
    return PointMassMeasure(orbit.points, np.full(n, 1.0 / n))


def compact_metric(x: float, y: float) -> float:
    """|1/(1+x) - 1/(1+y)| with 1/(1+inf) = 0."""
    ux = 0.0 if x == INFINITY else 1.0 / (1.0 + x)
    uy = 0.0 if y == INFINITY else 1.0 / (1.0 + y)
    return abs(ux - uy)


@dataclass
class ContractionTable:
    log_distance: np.ndarray
    compact_distance: np.ndarray
    log_nonincreasing: bool
    quarter_bound: bool

    @property
    def final_distance(self) -> float:
        return float(self.compact_distance[-1])


def _exact_table(x: float, y: float, word: Word, params: SystemParams):
    """Log distances and compact distances from rational orbits, plus the exact
    verdict on whether max(x_k, y_k) / min(x_k, y_k) ever grows."""
    a, b = params.as_exact().exact_pair()
    fx, fy = Fraction(x), Fraction(y)
    ratios = [max(fx, fy) / min(fx, fy)]
    dists = [abs(fx - fy) / ((1 + fx) * (1 + fy))]
    for s in word:
        if s:
            fx, fy = b * fx + 1, b * fy + 1
        else:
            fx, fy = a * fx, a * fy
        ratios.append(max(fx, fy) / min(fx, fy))
        dists.append(abs(fx - fy) / ((1 + fx) * (1 + fy)))
    nonincr = all(r1 <= r0 for r0, r1 in zip(ratios, ratios[1:]))
    logd = np.array([math.log1p(float(r - 1)) for r in ratios])
    return logd, np.array([float(d) for d in dists]), nonincr


def contraction_diagnostics(x: float, y: float, word: Word, params: SystemParams,
                            exact: bool = True) -> ContractionTable:
    """Per-step |ln x_k - ln y_k| and d(x_k, y_k) for two orbits driven by one word.

    Both maps are 1-Lipschitz in log coordinates, so the first column never grows,
    and d <= |ln x - ln y| / 4 holds at every step.  With ``exact`` the orbits are
    followed in rational arithmetic and monotonicity is decided by comparing the
    ratios max/min exactly.
    """
    if x <= 0 or y <= 0:
        raise ValueError("x and y must be positive")
    if exact:
        logd, d, nonincr = _exact_table(x, y, word, params)
    else:
        ox = path_orbit(word, x, params).points
        oy = path_orbit(word, y, params).points
        if not (np.all(np.isfinite(ox)) and np.all(np.isfinite(oy))):
            raise ValueError("orbit overflowed; log distances are undefined")
        logd = np.abs(np.log(ox / oy))
        d = np.abs(ox - oy) / ((1.0 + ox) * (1.0 + oy))
        nonincr = bool(np.all(np.diff(logd) <= 0.0))
    quarter = bool(np.all(d <= 0.25 * logd * (1.0 + 1e-12)))
    return ContractionTable(logd, d, nonincr, quarter)
