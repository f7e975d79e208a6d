"""Word algebra for the semigroup generated by T0(x) = a*x and T1(x) = b*x + 1.

A word (w_0, ..., w_{n-1}) acts as T_{w_{n-1}} o ... o T_{w_0}: the first
symbol is applied first.  Composite maps are affine, so they are carried as
(slope, intercept) pairs, either in floating point or as exact Fractions.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterator, Sequence

import numpy as np


def parse_real(value) -> float | Fraction:
    """Accept floats, ints, Fractions, or strings such as "4/3" and "0.5".

    Strings containing a slash become exact Fractions; everything else is a float
    unless it already is a Rational.
    """
    if isinstance(value, str):
        value = value.strip()
        if "/" in value:
            return Fraction(value)
        return float(value)
    if isinstance(value, Rational):
        return Fraction(value)
    return float(value)


@dataclass(frozen=True)
class SystemParams:
    """Contraction slope ``a`` and expansion slope ``b`` with 0 < a < 1 < b.

    ``a_exact``/``b_exact`` hold Fractions when the parameters were given as
    rationals; they are None otherwise.
    """

    a: float
    b: float
    a_exact: Fraction | None = None
    b_exact: Fraction | None = None

    def __post_init__(self):
        if not 0.0 < self.a < 1.0 < self.b:
            raise ValueError(f"need 0 < a < 1 < b, got a={self.a}, b={self.b}")

    @classmethod
    def create(cls, a, b) -> "SystemParams":
        a, b = parse_real(a), parse_real(b)
        a_ex = a if isinstance(a, Fraction) else None
        b_ex = b if isinstance(b, Fraction) else None
        return cls(float(a), float(b), a_ex, b_ex)

    @property
    def exact(self) -> bool:
        return self.a_exact is not None and self.b_exact is not None

    def exact_pair(self) -> tuple[Fraction, Fraction]:
        if not self.exact:
            raise ValueError("exact mode requires rational a and b")
        return self.a_exact, self.b_exact

    def as_exact(self) -> "SystemParams":
        """Exact copy; float parameters are converted through their binary value."""
        a = self.a_exact if self.a_exact is not None else Fraction(self.a)
        b = self.b_exact if self.b_exact is not None else Fraction(self.b)
        return SystemParams(self.a, self.b, a, b)

    def to_dict(self) -> dict:
        return {
            "a": str(self.a_exact) if self.a_exact is not None else self.a,
            "b": str(self.b_exact) if self.b_exact is not None else self.b,
        }


@dataclass(frozen=True)
class Word:
    """Finite 0-1 word stored as packed bits: bit i of ``bits`` is symbol w_i."""

    bits: int = 0
    length: int = 0

    def __post_init__(self):
        if self.length < 0 or self.bits < 0 or self.bits >> self.length:
            raise ValueError("bits do not fit in the stated length")

    @classmethod
    def from_symbols(cls, symbols: Sequence[int] | np.ndarray) -> "Word":
        arr = np.asarray(symbols, dtype=np.uint8)
        if arr.size and arr.max() > 1:
            raise ValueError("symbols must be 0 or 1")
        if arr.size == 0:
            return cls(0, 0)
        packed = np.packbits(arr, bitorder="little").tobytes()
        return cls(int.from_bytes(packed, "little"), int(arr.size))

    @classmethod
    def from_str(cls, text: str) -> "Word":
        if any(c not in "01" for c in text):
            raise ValueError(f"not a 0-1 word: {text!r}")
        return cls.from_symbols([int(c) for c in text])

    def symbols(self) -> np.ndarray:
        if self.length == 0:
            return np.zeros(0, dtype=np.uint8)
        raw = self.bits.to_bytes((self.length + 7) // 8, "little")
        arr = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
        return arr[: self.length]

    def __len__(self) -> int:
        return self.length

    def __iter__(self) -> Iterator[int]:
        for i in range(self.length):
            yield (self.bits >> i) & 1

    def __getitem__(self, i: int) -> int:
        if not -self.length <= i < self.length:
            raise IndexError(i)
        return (self.bits >> (i % self.length)) & 1

    def __str__(self) -> str:
        return "".join("1" if s else "0" for s in self)

    def __repr__(self) -> str:
        return f"Word('{self}')"

    def __add__(self, other: "Word") -> "Word":
        return Word(self.bits | (other.bits << self.length), self.length + other.length)

    def ones(self) -> int:
        return self.bits.bit_count()

    def reversed(self) -> "Word":
        return Word.from_symbols(self.symbols()[::-1])

    def sort_key(self) -> tuple[int, str]:
        """Length-lexicographic order on symbol strings."""
        return (self.length, str(self))


def zeros(n: int) -> Word:
    return Word(0, n)


def ones(n: int) -> Word:
    return Word((1 << n) - 1, n)


@dataclass(frozen=True)
class AffineMap:
    """x -> slope * x + intercept."""

    slope: float | Fraction
    intercept: float | Fraction

    def __call__(self, x):
        return apply(self, x)

    def then(self, other: "AffineMap") -> "AffineMap":
        """``other o self``."""
        return AffineMap(other.slope * self.slope, other.slope * self.intercept + other.intercept)


IDENTITY = AffineMap(1, 0)


def compose(word: Word, params: SystemParams, exact: bool | None = None) -> AffineMap:
    """Affine map of ``word``; exact whenever the parameters are exact (or ``exact``)."""
    if exact is None:
        exact = params.exact
    if exact:
        a, b = params.exact_pair() if params.exact else params.as_exact().exact_pair()
        slope, intercept = Fraction(1), Fraction(0)
    else:
        a, b = params.a, params.b
        slope, intercept = 1.0, 0.0
    for s in word:
        if s:
            slope, intercept = b * slope, b * intercept + 1
        else:
            slope, intercept = a * slope, a * intercept
    return AffineMap(slope, intercept)


def apply(amap: AffineMap, x):
    if x == math.inf:
        return math.inf
    return amap.slope * x + amap.intercept


def word_derivative(word: Word, params: SystemParams, exact: bool | None = None):
    if exact is None:
        exact = params.exact
    m = word.ones()
    if exact:
        a, b = params.exact_pair() if params.exact else params.as_exact().exact_pair()
        return a ** (word.length - m) * b ** m
    return params.a ** (word.length - m) * params.b ** m


@dataclass
class MR33Report:
    holds: bool | None
    lhs: float
    rhs: float
    precondition_ok: bool
    violation_prefix: int | None = None
    violation_value: float | None = None


def mr33_check(word: Word, x: float, bound_M: float, params: SystemParams) -> MR33Report:
    """Check 1/(a^(n-m) b^m) >= (m-1) x / (b M^2) when the orbit of x stays below M.

    If x or an intermediate image T_{w_k} o ... o T_{w_0}(x), k < n, exceeds M the
    report carries the offending prefix length and ``holds`` is None.
    """
    n, m = word.length, word.ones()
    lhs = 1.0 / (params.a ** (n - m) * params.b ** m)
    rhs = (m - 1) * x / (params.b * bound_M ** 2)
    if x > bound_M:
        return MR33Report(None, lhs, rhs, False, 0, x)
    y = x
    for k, s in enumerate(word):
        y = params.b * y + 1 if s else params.a * y
        if y > bound_M:
            return MR33Report(None, lhs, rhs, False, k + 1, y)
    return MR33Report(lhs >= rhs, lhs, rhs, True)


@dataclass
class CoincidenceClass:
    slope: Fraction
    intercept: Fraction
    words: list[Word] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "slope": str(self.slope),
            "intercept": str(self.intercept),
            "words": [str(w) for w in self.words],
        }


def _maps_of_length(n: int, a: Fraction, b: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Exact maps of all length-n words, indexed by the packed word bits."""
    maps = [(Fraction(1), Fraction(0))]
    for _ in range(n):
        # the new symbol becomes the highest bit and is applied last
        maps = [(a * s, a * c) for s, c in maps] + [(b * s, b * c + 1) for s, c in maps]
    return maps


def coincidence_search(max_len: int, params: SystemParams, exact: bool = True,
                       workers: int = 1) -> list[CoincidenceClass]:
    """Group all words of length <= max_len by their exact affine map.

    Returns only classes with at least two words, each sorted length-lexicographically,
    and the classes themselves ordered by their first word.
    """
    if not exact:
        raise ValueError("coincidence search runs in exact arithmetic only")
    if not params.exact:
        raise ValueError("exact mode requires rational a and b")
    a, b = params.exact_pair()
    lengths = list(range(max_len + 1))
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(workers) as pool:
            per_length = list(pool.map(_maps_of_length, lengths, [a] * len(lengths),
                                       [b] * len(lengths)))
    else:
        per_length = [_maps_of_length(n, a, b) for n in lengths]

    groups: dict[tuple[Fraction, Fraction], list[Word]] = defaultdict(list)
    for n, maps in zip(lengths, per_length):
        for bits, key in enumerate(maps):
            groups[key].append(Word(bits, n))
    classes = []
    for (slope, intercept), words in groups.items():
        if len(words) > 1:
            words.sort(key=Word.sort_key)
            classes.append(CoincidenceClass(slope, intercept, words))
    classes.sort(key=lambda c: c.words[0].sort_key())
    return classes
