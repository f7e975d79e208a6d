"""Absolutely continuous invariant measures of the inverse-branch map

    T(x) = x/a        on I0 = [(g-1)/b, g)
    T(x) = (x-1)/b    on I1 = [g, g/a]

on I = [(g-1)/b, g/a] for g > 1, computed with Ulam's method, and the shift
measure nu_g read off T-itineraries backwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import sparse

from .affine_core import SystemParams, Word
from .measures import PiecewiseLinearCDF, PointMassMeasure, kolmogorov_distance
from .shift_measures import rng_for


class OutsideIntervalError(ValueError):
    pass


@dataclass(frozen=True)
class AcimSystem:
    params: SystemParams
    gamma: float

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError("gamma must exceed 1")
        a, b = self.params.as_exact().exact_pair()
        g = Fraction(self.gamma)
        lo, hi = (g - 1) / b, g / a
        # both branch images must stay inside I (left branch sup, right branch ends)
        images = [lo / a, g / a, (g - 1) / b, (hi - 1) / b]
        if not all(lo <= v <= hi for v in images):
            raise ValueError("T does not map I into itself")

    @property
    def lo(self) -> float:
        return (self.gamma - 1.0) / self.params.b

    @property
    def hi(self) -> float:
        return self.gamma / self.params.a

    def branch(self, x: float) -> int:
        return 0 if x < self.gamma else 1


def t_map(x: float, sys: AcimSystem) -> float:
    if not sys.lo <= x <= sys.hi:
        raise OutsideIntervalError(f"{x} is outside [{sys.lo}, {sys.hi}]")
    if x < sys.gamma:
        return x / sys.params.a
    return (x - 1.0) / sys.params.b


def _clip(x: float, sys: AcimSystem) -> float:
    return min(max(x, sys.lo), sys.hi)


def transfer_matrix(sys: AcimSystem, K: int) -> sparse.csr_matrix:
    """Row-stochastic Ulam matrix: entry (i, j) is the fraction of bin i sent into bin j."""
    edges = np.linspace(sys.lo, sys.hi, K + 1)
    h = edges[1] - edges[0]
    a, b, g = sys.params.a, sys.params.b, sys.gamma
    rows, cols, vals = [], [], []
    for i in range(K):
        s, t = edges[i], edges[i + 1]
        pieces = []
        if t <= g:
            pieces.append((s, t, 0))
        elif s >= g:
            pieces.append((s, t, 1))
        else:
            pieces += [(s, g, 0), (g, t, 1)]
        for ps, pt, br in pieces:
            frac = (pt - ps) / h
            fs, ft = (ps / a, pt / a) if br == 0 else ((ps - 1.0) / b, (pt - 1.0) / b)
            fs, ft = _clip(fs, sys), _clip(ft, sys)
            j0 = min(int((fs - sys.lo) / h), K - 1)
            j1 = min(int((ft - sys.lo) / h), K - 1)
            span = ft - fs
            if span <= 0:
                rows.append(i); cols.append(j0); vals.append(frac)
                continue
            for j in range(j0, j1 + 1):
                overlap = min(ft, edges[j + 1]) - max(fs, edges[j])
                if overlap > 0:
                    rows.append(i); cols.append(j); vals.append(frac * overlap / span)
    M = sparse.csr_matrix((vals, (rows, cols)), shape=(K, K))
    # renormalize rows against accumulated rounding
    sums = np.asarray(M.sum(axis=1)).ravel()
    return sparse.diags(1.0 / sums) @ M


class PowerIterationError(RuntimeError):
    pass


@dataclass
class UlamDensity:
    edges: np.ndarray
    masses: np.ndarray
    residual: float
    iterations: int

    @property
    def K(self) -> int:
        return self.masses.size

    def measure(self) -> PiecewiseLinearCDF:
        return PiecewiseLinearCDF(self.edges, self.masses)

    def density(self) -> np.ndarray:
        return self.masses / np.diff(self.edges)


def ulam_density(sys: AcimSystem, K: int = 4096, iters: int = 200_000,
                 tol: float = 1e-8, matrix: sparse.csr_matrix | None = None) -> UlamDensity:
    """Invariant probability vector of the Ulam matrix by power iteration.

    The iteration uses the lazy matrix (I + P)/2, which has the same invariant
    vector but no eigenvalues of modulus one other than 1, so cyclic components of
    the chain cannot make it oscillate.  ``residual`` is ||vP - v||_1 for P itself.
    """
    if K < 64:
        raise ValueError("need at least 64 bins")
    P = transfer_matrix(sys, K) if matrix is None else matrix
    PT = P.T.tocsr()
    v = np.full(K, 1.0 / K)
    residual = math.inf
    for it in range(1, iters + 1):
        w = 0.5 * (v + PT @ v)
        w /= w.sum()
        if it % 16 == 0 or it == iters:
            residual = float(np.abs(PT @ w - w).sum())
            if residual <= tol:
                v = w
                break
        v = w
    else:
        raise PowerIterationError(f"power iteration did not converge (residual {residual:.3g})")
    edges = np.linspace(sys.lo, sys.hi, K + 1)
    return UlamDensity(edges, v, residual, it)


@dataclass
class SupportReport:
    intervals: list[tuple[float, float]]
    hull: tuple[float, float]
    bin_width: float

    def contains_in_interior(self, x: float) -> bool:
        return any(lo < x < hi for lo, hi in self.intervals)

    def to_dict(self) -> dict:
        return {"intervals": [list(iv) for iv in self.intervals], "hull": list(self.hull),
                "bin_width": self.bin_width}


def support_intervals(density: UlamDensity, threshold: float = 0.01) -> SupportReport:
    """Maximal runs of bins whose mass exceeds threshold / K."""
    above = density.masses > threshold / density.K
    if not above.any():
        raise ValueError("empty support: threshold too high")
    edges = density.edges
    padded = np.r_[False, above, False].astype(np.int8)
    starts = np.flatnonzero(np.diff(padded) == 1)
    stops = np.flatnonzero(np.diff(padded) == -1)
    intervals = [(float(edges[s]), float(edges[e])) for s, e in zip(starts, stops)]
    return SupportReport(intervals, (intervals[0][0], intervals[-1][1]), float(edges[1] - edges[0]))


def itinerary_symbols(x: float, n: int, sys: AcimSystem) -> tuple[np.ndarray, float]:
    """Symbols of x, T x, ..., T^{n-1} x and the end point T^n x."""
    if not sys.lo <= x <= sys.hi:
        raise OutsideIntervalError(f"{x} is outside [{sys.lo}, {sys.hi}]")
    a, b, g = sys.params.a, sys.params.b, sys.gamma
    lo, hi = sys.lo, sys.hi
    out = bytearray(n)
    for k in range(n):
        if x < g:
            x = x / a
        else:
            out[k] = 1
            x = (x - 1.0) / b
        # keep rounding from walking the orbit out of I
        if x < lo:
            x = lo
        elif x > hi:
            x = hi
    return np.frombuffer(bytes(out), dtype=np.uint8), x


def itinerary(x: float, n: int, sys: AcimSystem) -> Word:
    return Word.from_symbols(itinerary_symbols(x, n, sys)[0])


def replay(word: Word, end: float, sys: AcimSystem) -> float:
    """Undo an itinerary: apply the forward generators to T^n x in reverse order."""
    a, b = sys.params.a, sys.params.b
    y = end
    for s in reversed(list(word)):
        y = b * y + 1.0 if s else a * y
    return y


class InsufficientSamplesError(ValueError):
    pass


@dataclass
class CylinderTable:
    """Frequencies indexed by packed word bits: ``freq[w.bits]`` is nu_g(C_w)."""

    depth: int
    freq: np.ndarray
    samples: int

    def __getitem__(self, word: Word) -> float:
        if word.length != self.depth:
            raise KeyError(f"table has depth {self.depth}, word has length {word.length}")
        return float(self.freq[word.bits])

    def as_dict(self) -> dict[str, float]:
        return {str(Word(i, self.depth)): float(f) for i, f in enumerate(self.freq)}

    def marginal(self, depth: int) -> "CylinderTable":
        """Lower-depth table obtained by summing over the last symbols of each word."""
        if depth > self.depth:
            raise ValueError("can only marginalize to a smaller depth")
        f = self.freq.reshape(1 << (self.depth - depth), 1 << depth).sum(axis=0)
        return CylinderTable(depth, f, self.samples)

    def lyapunov(self, params: SystemParams) -> float:
        m0 = float(self.marginal(1).freq[0]) if self.depth >= 1 else 1.0
        return m0 * math.log(params.a) + (1.0 - m0) * math.log(params.b)


def sample_from_density(density: UlamDensity, size: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF draw: pick a bin by mass, then a uniform point inside it."""
    cum = np.cumsum(density.masses)
    cum /= cum[-1]
    idx = np.minimum(np.searchsorted(cum, rng.random(size), side="right"), density.K - 1)
    left = density.edges[idx]
    return left + rng.random(size) * (density.edges[idx + 1] - left)


def long_itineraries(sys: AcimSystem, density: UlamDensity, samples: int, seed: int,
                     chains: int = 8, burn_in: int = 1000) -> list[np.ndarray]:
    """``chains`` itineraries of total length ``samples`` after ``burn_in`` steps each."""
    rng = rng_for(seed, 0)
    starts = sample_from_density(density, chains, rng)
    per = [samples // chains + (1 if c < samples % chains else 0) for c in range(chains)]
    out = []
    for x0, n in zip(starts, per):
        _, x = itinerary_symbols(float(x0), burn_in, sys)
        out.append(itinerary_symbols(x, n, sys)[0])
    return out


def block_frequencies(chains: list[np.ndarray], depth: int, reverse: bool = True) -> np.ndarray:
    """Sliding-window frequencies of length-``depth`` blocks, indexed by packed bits.

    With ``reverse`` the block (s_k, ..., s_{k+d-1}) is filed under the word
    (s_{k+d-1}, ..., s_k).
    """
    counts = np.zeros(1 << depth, dtype=np.int64)
    for s in chains:
        L = s.size - depth + 1
        if L <= 0:
            continue
        code = np.zeros(L, dtype=np.int64)
        for j in range(depth):
            shift = depth - 1 - j if reverse else j
            code |= s[j:j + L].astype(np.int64) << shift
        counts += np.bincount(code, minlength=1 << depth)
    total = counts.sum()
    if total == 0:
        raise InsufficientSamplesError("no complete blocks")
    return counts / total


def nu_gamma_cylinders(sys: AcimSystem, depth: int, samples: int, seed: int,
                       density: UlamDensity | None = None, chains: int = 8,
                       burn_in: int = 1000, min_per_cell: int = 10) -> CylinderTable:
    """Empirical nu_g(C_w) for all words of length ``depth``.

    Orbits start from the Ulam density, so the itinerary process is (nearly)
    stationary; reading blocks backwards turns frequencies of the past of the
    inverse-branch orbit into cylinder masses of the forward action.
    """
    if depth > 12:
        raise ValueError("depth at most 12")
    if depth == 0:
        return CylinderTable(0, np.ones(1), samples)
    if samples < min_per_cell * (1 << depth):
        raise InsufficientSamplesError(
            f"{samples} samples for {1 << depth} cylinders; need at least {min_per_cell} per cylinder")
    if density is None:
        density = ulam_density(sys)
    chains_ = long_itineraries(sys, density, samples, seed, chains, burn_in)
    return CylinderTable(depth, block_frequencies(chains_, depth), samples)


def word_images(x: float, n: int, params: SystemParams) -> np.ndarray:
    """T_w(x) for all words of length n, indexed by packed bits."""
    xs = np.array([float(x)])
    for _ in range(n):
        xs = np.concatenate((params.a * xs, params.b * xs + 1.0))
    return xs


def cylinder_sphere_measure(table: CylinderTable, x: float, params: SystemParams) -> PointMassMeasure:
    """sum_w table[w] delta_{T_w x} over words of the table's depth."""
    return PointMassMeasure(word_images(x, table.depth, params), table.freq, normalize_tol=1e-9)


def roundtrip_distance(sys: AcimSystem, n: int, table: CylinderTable, density: UlamDensity,
                        x: float = 1.0) -> float:
    """Kolmogorov distance between the nu_g-weighted sphere average and the Ulam measure."""
    if n > 10:
        raise ValueError("depth at most 10")
    t = table if table.depth == n else table.marginal(n)
    return kolmogorov_distance(cylinder_sphere_measure(t, x, sys.params), density.measure())
