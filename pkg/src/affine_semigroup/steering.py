"""Steering orbits to targets, universal approximation sequences, and interleaving
with an enumeration of the whole semigroup."""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .affine_core import SystemParams, Word, compose, zeros
from .measures import PointMassMeasure, kolmogorov_distance
from .shift_measures import rng_for
from .skew_dynamics import path_orbit
from .stationary_solver import holder_certificate


class SteeringError(AssertionError):
    pass


@dataclass
class SteerResult:
    word: Word
    x: float
    y: float
    epsilon: float
    leading_zeros: int
    image: float
    slope: float
    orbit_min: float
    orbit_max: float

    @property
    def error(self) -> float:
        return abs(self.image - self.y)

    def slope_bound(self, params: SystemParams) -> float:
        """a^j * a * eps / 2: certificate slope bound after j leading zeros."""
        return params.a ** self.leading_zeros * params.a * self.epsilon / 2.0


def _result(word: Word, x: float, y: float, eps: float, j: int, params: SystemParams) -> SteerResult:
    amap = compose(word, params, exact=False)
    orbit = path_orbit(word, x, params).points
    return SteerResult(word, x, y, eps, j, float(amap(x)), float(amap.slope),
                       float(orbit.min()), float(orbit.max()))


def steer(x: float, y: float, epsilon: float, params: SystemParams, p: float = 0.5,
          allow_empty: bool = True) -> SteerResult:
    """A word w with |T_w(x) - y| < epsilon.

    j leading zeros bring x into [0, 1/a]; the certificate word for
    [y - eps/2, y + eps/2] (clipped at 0) then maps all of [0, 1/a] into that
    interval.  ``p`` only enters the diagnostic constants of the certificate.
    With ``allow_empty`` the empty word is returned when x is already close.
    """
    if x < 0 or y <= 0 or epsilon <= 0:
        raise ValueError("need x >= 0, y > 0, epsilon > 0")
    if allow_empty and abs(x - y) < epsilon:
        return _result(Word(0, 0), x, y, epsilon, 0, params)
    a, inv_a = params.a, 1.0 / params.a
    j, z = 0, float(x)
    while z > inv_a:
        z *= a
        j += 1
    cert = holder_certificate(max(y - epsilon / 2.0, 0.0), y + epsilon / 2.0, p, params)
    res = _result(zeros(j) + cert.word, x, y, epsilon, j, params)
    if not res.error < epsilon:
        raise SteeringError(f"steered to {res.image}, target {y} +- {epsilon}")
    return res


@dataclass
class ApproxElement:
    index: int        # 1-based
    target: float
    word: Word
    image: float
    slope: float

    @property
    def error(self) -> float:
        return abs(self.image - self.target)


def _approx_one(args) -> ApproxElement:
    i, target, params = args
    # the certificate route is needed even when 1 is already close to the target,
    # since leading zeros would move an empty word's image
    word = steer(1.0, target, 1.0 / (2 * i), params, allow_empty=False).word
    amap = compose(word, params, exact=False)
    # more leading zeros shrink the slope; 1 stays in [0, 1/a] so the image stays put
    while not amap.slope < 1.0 / i:
        word = zeros(1) + word
        amap = compose(word, params, exact=False)
    el = ApproxElement(i, float(target), word, float(amap(1.0)), float(amap.slope))
    if not (el.error < 1.0 / i and el.slope < 1.0 / i):
        raise SteeringError(f"element {i}: error {el.error}, slope {el.slope}")
    return el


def approx_sequence(target, N: int, params: SystemParams, seed: int,
                    workers: int = 1) -> list[ApproxElement]:
    """g_1..g_N with |T_{g_i}(1) - a_i| < 1/i and T'_{g_i} < 1/i.

    ``target`` is either an object with ``sample(rng, size)`` or an array of
    N target points.
    """
    if hasattr(target, "sample"):
        pts = np.asarray(target.sample(rng_for(seed, 0), N), dtype=float)
    else:
        pts = np.asarray(target, dtype=float)[:N]
    if pts.size != N or not np.all(np.isfinite(pts)) or np.any(pts < 0):
        raise ValueError("need N finite nonnegative target points")
    # steering needs y > 0; a target at 0 is approximated from just above
    pts = np.maximum(pts, 0.0)
    jobs = [(i, float(pts[i - 1]) if pts[i - 1] > 0 else 1.0 / (4 * i), params)
            for i in range(1, N + 1)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(_approx_one, jobs, chunksize=64))
    else:
        out = [_approx_one(j) for j in jobs]
    for el, t in zip(out, pts):
        el.target = float(t)
    return out


def images(words: Iterable[Word], x: float, params: SystemParams) -> np.ndarray:
    return np.array([float(compose(w, params, exact=False)(x)) for w in words])


def empirical(words: Iterable[Word], x: float, params: SystemParams) -> PointMassMeasure:
    return PointMassMeasure(images(words, x, params))


def enumerate_semigroup() -> Iterator[Word]:
    """All words in length-lexicographic order, starting with the empty word."""
    for n in itertools.count():
        for bits in itertools.product((0, 1), repeat=n):
            yield Word.from_symbols(bits)


def exhaustive_interleave(seq: Iterable[Word]) -> Iterator[Word]:
    """Put the k-th enumerated word at output position k^2 (1-based), the input elsewhere.

    Stops when the input runs out.  An empty input is rejected immediately.
    """
    it = iter(seq)
    try:
        first = next(it)
    except StopIteration:
        raise ValueError("empty input sequence") from None
    return _interleave(first, it)


def _interleave(nxt: Word, it: Iterator[Word]) -> Iterator[Word]:
    enum = enumerate_semigroup()
    k, pos = 1, 1
    while True:
        if pos == k * k:
            yield next(enum)
            k += 1
        else:
            yield nxt
            try:
                nxt = next(it)
            except StopIteration:
                return
        pos += 1


def insertion_positions(L: int) -> dict[str, int]:
    """1-based output position of every word of length <= L."""
    return {str(w): (k + 1) ** 2
            for k, w in enumerate(itertools.islice(enumerate_semigroup(), (1 << (L + 1)) - 1))}


def wasserstein_to_point(words: list[Word], x: float, c: float, params: SystemParams) -> float:
    """W1 distance between the empirical measure of T_w(x) and the Dirac mass at c."""
    return float(np.mean(np.abs(images(words, x, params) - c)))


def distance_to(words: list[Word], x: float, target, params: SystemParams) -> float:
    return kolmogorov_distance(empirical(words, x, params), target)


def write_sequence(elements: list[ApproxElement], path: Path) -> None:
    """One word per line, plus ``<name>.json`` with per-element error and slope."""
    path = Path(path)
    path.write_text("".join(f"{el.word}\n" for el in elements))
    side = [{"index": el.index, "target": el.target, "image": el.image,
             "error": el.error, "slope": el.slope, "length": el.word.length} for el in elements]
    path.with_suffix(".json").write_text(json.dumps(side, indent=1))


def read_sequence(path: Path) -> list[Word]:
    return [Word.from_str(line.strip()) for line in Path(path).read_text().splitlines()]
