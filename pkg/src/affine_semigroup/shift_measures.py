"""Shift-invariant measures on one-sided 0-1 sequences: Bernoulli and two-state Markov."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .affine_core import SystemParams, Word

_TOL = 1e-12


@dataclass(frozen=True)
class ShiftMeasure:
    """Either Bernoulli (``p`` = probability of symbol 0) or a stationary Markov chain.

    Build with :meth:`bernoulli` or :meth:`markov`; the stationary vector of a
    Markov measure is always recomputed from the transition table.
    """

    kind: str
    p: float | None = None
    P: tuple[tuple[float, float], tuple[float, float]] | None = None
    pi: tuple[float, float] | None = None

    @classmethod
    def bernoulli(cls, p: float) -> "ShiftMeasure":
        p = float(p)
        if not 0.0 < p < 1.0:
            raise ValueError(f"Bernoulli parameter must satisfy 0 < p < 1, got {p}")
        return cls("bernoulli", p=p)

    @classmethod
    def markov(cls, P, pi=None) -> "ShiftMeasure":
        P = np.asarray(P, dtype=float)
        if P.shape != (2, 2) or np.any(P < 0):
            raise ValueError("transition table must be a nonnegative 2x2 array")
        if np.any(np.abs(P.sum(axis=1) - 1.0) > _TOL):
            raise ValueError("transition rows must sum to 1")
        p01, p10 = P[0, 1], P[1, 0]
        if p01 <= 0 or p10 <= 0:
            raise ValueError("chain must be irreducible (both off-diagonal entries positive)")
        # two-state balance: pi0 * p01 = pi1 * p10
        stationary = (p10 / (p01 + p10), p01 / (p01 + p10))
        if pi is not None:
            pi = np.asarray(pi, dtype=float)
            if np.max(np.abs(pi - stationary)) > _TOL:
                raise ValueError(f"supplied pi {pi.tolist()} is not stationary; expected {stationary}")
        return cls("markov", P=(tuple(P[0]), tuple(P[1])), pi=stationary)

    @property
    def mass0(self) -> float:
        """nu(C_0), the frequency of symbol 0."""
        return self.p if self.kind == "bernoulli" else self.pi[0]

    def transition(self) -> np.ndarray:
        if self.kind == "bernoulli":
            return np.array([[self.p, 1 - self.p], [self.p, 1 - self.p]])
        return np.array(self.P)

    def initial(self) -> np.ndarray:
        if self.kind == "bernoulli":
            return np.array([self.p, 1 - self.p])
        return np.array(self.pi)

    def to_dict(self) -> dict:
        if self.kind == "bernoulli":
            return {"kind": "bernoulli", "p": self.p}
        return {"kind": "markov", "P": [list(r) for r in self.P], "pi": list(self.pi)}

    @classmethod
    def from_dict(cls, d: dict) -> "ShiftMeasure":
        if d["kind"] == "bernoulli":
            return cls.bernoulli(d["p"])
        return cls.markov(d["P"], d.get("pi"))


def cylinder_mass(nu: ShiftMeasure, word: Word) -> float:
    if word.length == 0:
        return 1.0
    if nu.kind == "bernoulli":
        m = word.ones()
        return nu.p ** (word.length - m) * (1 - nu.p) ** m
    syms = list(word)
    mass = nu.pi[syms[0]]
    for s, t in zip(syms, syms[1:]):
        mass *= nu.P[s][t]
    return mass


def lyapunov(nu: ShiftMeasure, params: SystemParams) -> float:
    q0 = nu.mass0
    return q0 * math.log(params.a) + (1 - q0) * math.log(params.b)


def rng_for(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by (seed, stream)."""
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), stream]))


def sample_symbols(nu: ShiftMeasure, n: int, seed: int, stream: int = 0) -> np.ndarray:
    """Length-n path drawn from ``nu`` as a uint8 array."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    rng = rng_for(seed, stream)
    if n == 0:
        return np.zeros(0, dtype=np.uint8)
    if nu.kind == "bernoulli":
        return (rng.random(n) >= nu.p).astype(np.uint8)
    # Markov: alternating geometric runs; the first symbol comes from pi
    sym = 0 if rng.random() < nu.pi[0] else 1
    leave = (nu.P[0][1], nu.P[1][0])
    out = np.empty(n, dtype=np.uint8)
    filled = 0
    while filled < n:
        batch = int((n - filled) * max(leave)) + 16
        runs = np.empty(2 * batch, dtype=np.int64)
        runs[0::2] = rng.geometric(leave[sym], size=batch)
        runs[1::2] = rng.geometric(leave[1 - sym], size=batch)
        syms = np.empty(2 * batch, dtype=np.uint8)
        syms[0::2], syms[1::2] = sym, 1 - sym
        seg = np.repeat(syms, runs)
        take = min(seg.size, n - filled)
        out[filled:filled + take] = seg[:take]
        filled += take
        sym = 1 - int(syms[-1])
    return out


def sample_path(nu: ShiftMeasure, n: int, seed: int, stream: int = 0) -> Word:
    return Word.from_symbols(sample_symbols(nu, n, seed, stream))
