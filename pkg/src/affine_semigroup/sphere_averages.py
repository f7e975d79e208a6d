"""Cylinder-weighted sphere averages  mu_{n,x} = sum_{|w| = n} nu(C_w) delta_{T_w x}."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .affine_core import SystemParams
from .measures import PointMassMeasure, kolmogorov_distance
from .shift_measures import ShiftMeasure

DEFAULT_DEPTH_CAP = 24

__all__ = ["sphere_measure", "kolmogorov_distance", "refinement_check", "DEFAULT_DEPTH_CAP"]


def _grow(x, w, last, steps: int, a: float, b: float, P: np.ndarray):
    """Append ``steps`` symbols to every atom; the new symbol becomes the top index bit."""
    for _ in range(steps):
        x = np.concatenate((a * x, b * x + 1.0))
        w = np.concatenate((w * P[last, 0], w * P[last, 1]))
        last = np.concatenate((np.zeros(last.size, np.int8), np.ones(last.size, np.int8)))
    return x, w, last


def _first_level(x0: float, nu: ShiftMeasure, params: SystemParams):
    pi = nu.initial()
    return (np.array([params.a * x0, params.b * x0 + 1.0]), np.array([pi[0], pi[1]]),
            np.array([0, 1], dtype=np.int8))


def sphere_measure(nu: ShiftMeasure, x: float, n: int, params: SystemParams,
                   depth_cap: int = DEFAULT_DEPTH_CAP, workers: int = 1,
                   prune_below: float | None = None) -> PointMassMeasure:
    """All 2^n atoms T_w(x) with weights nu(C_w), in packed-word index order.

    With ``workers > 1`` the first ceil(log2(workers)) symbols are split across
    threads; every atom is produced by the same sequence of floating operations,
    so the result is bit-identical to the sequential sweep.

    ``prune_below`` (required beyond ``depth_cap``) drops atoms lighter than the
    threshold after each level and renormalizes: the result is then approximate.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if prune_below is None and n > depth_cap:
        raise ValueError(f"depth {n} exceeds the cap {depth_cap}; pass prune_below to go deeper")
    if n == 0:
        return PointMassMeasure.delta(x)
    a, b, P = params.a, params.b, nu.transition()
    xs, ws, last = _first_level(x, nu, params)

    if prune_below is not None:
        for _ in range(n - 1):
            xs, ws, last = _grow(xs, ws, last, 1, a, b, P)
            keep = ws >= prune_below
            xs, ws, last = xs[keep], ws[keep], last[keep]
        return PointMassMeasure(xs, ws / ws.sum())

    split = min(max(0, math.ceil(math.log2(workers))) if workers > 1 else 0, n)
    if split <= 1:
        xs, ws, _ = _grow(xs, ws, last, n - 1, a, b, P)
        return PointMassMeasure(xs, ws, normalize_tol=1e-12)

    xs, ws, last = _grow(xs, ws, last, split - 1, a, b, P)
    rest = n - split
    out_x = np.empty((1 << rest, 1 << split))
    out_w = np.empty_like(out_x)

    def block(prefix: int):
        bx, bw, _ = _grow(xs[prefix:prefix + 1], ws[prefix:prefix + 1],
                          last[prefix:prefix + 1], rest, a, b, P)
        out_x[:, prefix] = bx
        out_w[:, prefix] = bw

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(block, range(1 << split)))
    return PointMassMeasure(out_x.ravel(), out_w.ravel(), normalize_tol=1e-12)


def refinement_check(nu: ShiftMeasure, x: float, n: int, params: SystemParams) -> float:
    """Kolmogorov distance between mu_{n+1,x} and T_p mu_{n,x} (zero up to rounding)."""
    if nu.kind != "bernoulli":
        raise ValueError("the one-step refinement identity needs a Bernoulli measure")
    from .stationary_solver import tp_pushforward

    finer = sphere_measure(nu, x, n + 1, params)
    pushed = tp_pushforward(sphere_measure(nu, x, n, params), nu.p, params)
    return kolmogorov_distance(finer, pushed)


def mass_on(m: PointMassMeasure, M: float) -> float:
    """Mass of [0, M]."""
    return float(m.cdf(M))
