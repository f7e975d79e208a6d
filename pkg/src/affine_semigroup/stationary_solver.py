"""Stationary measure of the Bernoulli random affine system and its Hölder certificates.

With probability p apply T0(x) = a x, otherwise T1(x) = b x + 1.  The stationary
law mu is the fixed point of

    T_p mu = p (T0)_* mu + (1 - p) (T1)_* mu,

which on distribution functions reads F_new(x) = p F(x/a) + (1 - p) F((x - 1)/b).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .affine_core import SystemParams, Word, compose
from .measures import GridMeasure, PointMassMeasure, from_u, kolmogorov_distance
from .shift_measures import ShiftMeasure, lyapunov


class PositiveLyapunovError(ValueError):
    """No stationary probability measure on [0, inf) exists (Lyapunov exponent >= 0)."""


class NonConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float, measure=None):
        super().__init__(message)
        self.residual = residual
        self.measure = measure


class MomentDivergenceError(ValueError):
    pass


class CertificateError(RuntimeError):
    pass


def _pushforward_plan(N: int, p: float, params: SystemParams):
    """Interpolation indices/weights so that F_new = plan(F) on the u-grid."""
    a, b = params.a, params.b
    u = np.linspace(0.0, 1.0, N + 1)
    # u-image of x/a and of (x - 1)/b; the second only exists for x >= 1 (u <= 1/2)
    u0 = a * u / (a * u + 1.0 - u)
    valid = u <= 0.5
    den = np.where(valid, b * u + 1.0 - 2.0 * u, 1.0)
    u1 = np.where(valid, b * u / den, 0.0)

    def locate(v):
        pos = v * N
        j = np.minimum(np.floor(pos).astype(np.int64), N - 1)
        return j, pos - j

    j0, w0 = locate(u0)
    j1, w1 = locate(u1)
    return j0, w0, j1, w1, valid


def _apply_plan(plan, F: np.ndarray, p: float) -> np.ndarray:
    j0, w0, j1, w1, valid = plan
    left = (1.0 - w0) * F[j0] + w0 * F[j0 + 1]
    right = np.where(valid, (1.0 - w1) * F[j1] + w1 * F[j1 + 1], 0.0)
    out = p * left + (1.0 - p) * right
    out[0] = F[0]  # mass at infinity is invariant
    return out


def tp_pushforward(mu, p: float, params: SystemParams):
    """T_p applied to a GridMeasure (on its own grid) or exactly to a PointMassMeasure."""
    if isinstance(mu, PointMassMeasure):
        x = mu.x
        return PointMassMeasure(
            np.concatenate((params.a * x, params.b * x + 1.0)),
            np.concatenate((p * mu.weights, (1.0 - p) * mu.weights)),
        )
    plan = _pushforward_plan(mu.N, p, params)
    return GridMeasure(_apply_plan(plan, mu.cdf_nodes, p), mu.mass_at_infinity)


def solve_stationary(p: float, params: SystemParams, N: int = 2 ** 16, tol: float = 1e-6,
                     max_iters: int = 10_000, start: float = 1.0) -> GridMeasure:
    """Iterate T_p from a Dirac mass until successive CDFs differ by at most ``tol``.

    The returned measure carries its own fixed-point residual (sup-distance between
    mu and T_p mu) and the iteration count in ``meta``.
    """
    nu = ShiftMeasure.bernoulli(p)
    lam = lyapunov(nu, params)
    if lam >= 0:
        raise PositiveLyapunovError(
            f"Lyapunov exponent {lam:.6g} >= 0 for a={params.a}, b={params.b}, p={p}: "
            "no stationary probability measure exists")
    plan = _pushforward_plan(N, p, params)
    F = GridMeasure.delta(start, N).cdf_nodes
    step = math.inf
    for it in range(1, max_iters + 1):
        G = _apply_plan(plan, F, p)
        step = float(np.abs(G - F).max())
        F = G
        if step <= tol:
            break
    else:
        raise NonConvergenceError(
            f"no convergence after {max_iters} iterations (last step {step:.3g})",
            step, GridMeasure(F))
    residual = float(np.abs(_apply_plan(plan, F, p) - F).max())
    meta = {"a": params.a, "b": params.b, "p": p, "N": N, "tol": tol,
            "iterations": it, "residual": residual, "lyapunov": lam}
    return GridMeasure(F, 0.0, meta)


def fixed_point_residual(mu: GridMeasure, p: float, params: SystemParams) -> float:
    return kolmogorov_distance(mu, tp_pushforward(mu, p, params))


def moment_oracle(p: float, params: SystemParams, order: int) -> float:
    """Closed-form first or second moment of the stationary law.

    Taking expectations in X' = A X + B with (A, B) = (a, 0) or (b, 1):
    E = (1-p) / (1 - pa - (1-p) b) and E2 = (1-p)(2bE + 1) / (1 - pa^2 - (1-p) b^2).
    """
    a, b = params.a, params.b
    d1 = 1.0 - p * a - (1.0 - p) * b
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if d1 <= 0:
        raise MomentDivergenceError(f"p*a + (1-p)*b = {1 - d1:.6g} >= 1: mean is infinite")
    mean = (1.0 - p) / d1
    if order == 1:
        return mean
    d2 = 1.0 - p * a * a - (1.0 - p) * b * b
    if d2 <= 0:
        raise MomentDivergenceError(f"p*a^2 + (1-p)*b^2 = {1 - d2:.6g} >= 1: second moment is infinite")
    return (1.0 - p) * (2.0 * b * mean + 1.0) / d2


def quantile_map(mu: GridMeasure, s):
    """H(s) = y with mu([0, y]) = s, by inverse linear interpolation of the CDF in u."""
    s = np.asarray(s, dtype=float)
    F = mu.cdf_nodes[::-1]       # increasing, from mu({0}) at x = 0 to 1 - mass_inf at x = inf
    u = mu.u_nodes[::-1]
    # flat stretches would make the inverse ambiguous; take the left-most node of each
    keep = np.r_[True, np.diff(F) > 0]
    uu = np.interp(s, F[keep], u[keep])
    out = from_u(uu)
    return out if out.ndim else float(out)


def _log_plus(v: float) -> float:
    return max(0.0, math.log(v)) if v > 0 else 0.0


@dataclass
class HolderConstants:
    k_bound: float
    c1: float
    c2: float
    c3: float
    c5: float
    q: float


def holder_constants(t: float, interval_length: float | None, p: float,
                     params: SystemParams) -> HolderConstants:
    """Constants of the lower bound log mu(I) > c4(t) + c5 log|I| for I centred at t.

    k_bound:  log+(t a)/log b + 1          (k is strictly below it)
    c1(t):    log(2 b^(log+(ta)/log b + 3) / a^3) * log((a+b-1)/a) / (log b * log(b/(a+b-1))) + 1
    c2:       log((a+b-1)/a) / (log b * log(b/(a+b-1)))
    c3(t):    k_bound + c1(t), so that k + m < c3(t) - c2 log|I|
    c5:       -log(q) * c2, q = min(p, 1-p)

    ``interval_length`` is accepted for symmetry with the certificate and unused:
    none of the constants depend on |I|.
    """
    a, b = params.a, params.b
    lb = math.log(b)
    spread = math.log((a + b - 1.0) / a)
    gap = math.log(b / (a + b - 1.0))
    lp = _log_plus(t * a)
    k_bound = lp / lb + 1.0
    c2 = spread / (lb * gap)
    log_num = math.log(2.0) + (lp / lb + 3.0) * lb - 3.0 * math.log(a)
    c1 = log_num * c2 + 1.0
    q = min(p, 1.0 - p)
    return HolderConstants(k_bound, c1, c2, k_bound + c1, -math.log(q) * c2, q)


@dataclass
class HolderCertificate:
    """Word w of length k + m with T_w([0, 1/a]) inside the target interval."""

    lo: float
    hi: float
    k: int
    m: int
    word: Word
    constants: HolderConstants
    image: tuple[Fraction, Fraction]
    retries: int = 0
    branch_record: list[int] = field(default_factory=list)

    @property
    def center(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def eq7_rhs(self) -> float:
        return self.constants.c3 - self.constants.c2 * math.log(self.length)

    @property
    def m_rhs(self) -> float:
        return self.constants.c1 - self.constants.c2 * math.log(self.length)

    def length_bound_holds(self) -> bool:
        return self.k + self.m < self.eq7_rhs

    def inclusion_holds(self) -> bool:
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        return all(lo <= v <= hi for v in self.image)

    def measure_lower_bound(self, mass_0_to_inv_a: float) -> float:
        """q^(k+m) * mu([0, 1/a])."""
        return self.constants.q ** (self.k + self.m) * mass_0_to_inv_a

    def to_dict(self) -> dict:
        return {
            "interval": [self.lo, self.hi], "center": self.center, "k": self.k, "m": self.m,
            "word": str(self.word), "retries": self.retries,
            "image": [float(v) for v in self.image],
            "c1": self.constants.c1, "c2": self.constants.c2, "c3": self.constants.c3,
            "c5": self.constants.c5, "q": self.constants.q,
            "length_bound": self.eq7_rhs, "length_bound_holds": self.length_bound_holds(),
            "inclusion_holds": self.inclusion_holds(),
        }


def holder_certificate(lo: float, hi: float, p: float, params: SystemParams,
                       max_retries: int = 64) -> HolderCertificate:
    """Build the preimage word for I = [lo, hi] and verify T_w([0, 1/a]) in I exactly.

    Walk back from the centre t: first k steps of T1^{-1} until the point is at most
    1/a, then the expanding map phi(x) = x/a (x < 1), (x-1)/b (x >= 1), recording the
    branch taken, until the forward slope of the accumulated word drops to a|I|/2.
    The forward word is the branch record read backwards.
    """
    if not (0.0 <= lo < hi):
        raise ValueError("need 0 <= lo < hi")
    a, b = params.a, params.b
    inv_a = 1.0 / a
    t = 0.5 * (lo + hi)
    target = a * (hi - lo) / 2.0
    record: list[int] = []
    z, slope = t, 1.0
    while z > inv_a:
        z = (z - 1.0) / b
        slope *= b
        record.append(1)
    k = len(record)
    consts = holder_constants(t, hi - lo, p, params)
    exact = params.as_exact()
    a_ex, b_ex = exact.exact_pair()
    retries = 0
    while True:
        while slope > target:
            if z < 1.0:
                z, slope = z / a, slope * a
                record.append(0)
            else:
                z, slope = (z - 1.0) / b, slope * b
                record.append(1)
        word = Word.from_symbols(record[::-1])
        amap = compose(word, exact, exact=True)
        image = (amap.intercept, amap.slope / a_ex + amap.intercept)
        cert = HolderCertificate(lo, hi, k, len(record) - k, word, consts, image, retries,
                                 list(record))
        if cert.inclusion_holds():
            return cert
        retries += 1
        if retries > max_retries:
            raise CertificateError(
                f"inclusion failed after {max_retries} extensions; image {[float(v) for v in image]}")
        # rounding pushed the image out: take one more preimage step and re-verify
        target = min(target, slope) * 0.5


def rotation_number(params: SystemParams) -> float:
    """log((a+b-1)/(ab)) / log((a+b-1)/a)."""
    a, b = params.a, params.b
    return math.log((a + b - 1.0) / (a * b)) / math.log((a + b - 1.0) / a)


def rotation_number_numeric(params: SystemParams, iters: int = 1_000_000, x0: float = 0.0) -> float:
    """Average lifted displacement of the circle map psi on [0, 1/a).

    psi(x) = (1-a)/(ab) + (a+b-1)/(ab) x for x < 1 and (x-1)/b for x >= 1.  Positions
    are measured in log(x + 1/(b-1)) normalised to circle length 1; each use of the
    right lap is one full turn.
    """
    a, b = params.a, params.b
    c0, c1 = (1.0 - a) / (a * b), (a + b - 1.0) / (a * b)
    shift = 1.0 / (b - 1.0)
    base = math.log(shift)
    length = math.log((a + b - 1.0) / a)
    x, turns = x0, 0
    for _ in range(iters):
        if x < 1.0:
            x = c0 + c1 * x
        else:
            x = (x - 1.0) / b
            turns += 1
    theta0 = (math.log(x0 + shift) - base) / length
    theta = (math.log(x + shift) - base) / length
    return (theta - theta0 + turns) / iters
