"""The acceptance checks as library functions, shared by ``affine-semigroup verify``
and the test suite.  Each check returns a :class:`CriterionResult`; nothing here
loosens a threshold to make a check pass."""

from __future__ import annotations

import filecmp
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import acim_lab as acim
from . import export
from .affine_core import SystemParams, coincidence_search
from .measures import TruncatedExponential, from_u, kolmogorov_distance, to_u
from .shift_measures import ShiftMeasure, rng_for, sample_path
from .skew_dynamics import contraction_diagnostics, path_average
from .sphere_averages import sphere_measure
from .stationary_solver import (PositiveLyapunovError, fixed_point_residual, holder_certificate,
                                moment_oracle, rotation_number, rotation_number_numeric,
                                solve_stationary)
from . import steering

MARKOV_P = [[0.9, 0.1], [0.2, 0.8]]


@dataclass
class VerifyConfig:
    seed: int = 20240601
    out: Path | None = None
    workers: int = 1
    grid: int = 2 ** 16
    bins: int = 4096

    def path(self, name: str) -> Path | None:
        return None if self.out is None else Path(self.out) / name


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: dict[str, bool]
    values: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def line(self) -> str:
        failed = [k for k, v in self.checks.items() if not v]
        status = "PASS" if self.passed else "FAIL"
        tail = "" if not failed else "  failed: " + ", ".join(failed)
        return f"{self.number:>2}  {status}  {self.title}  ({self.seconds:.1f} s){tail}"

    def to_dict(self) -> dict:
        return {"number": self.number, "title": self.title, "passed": self.passed,
                "checks": self.checks, "values": self.values, "seconds": self.seconds}


def _summary_csv(cfg: VerifyConfig, number: int, values: dict) -> None:
    # wall times vary between runs, so they stay out of the CSV
    p = cfg.path(f"criterion_{number:02d}.csv")
    if p is not None:
        rows = sorted((k, v) for k, v in values.items() if "seconds" not in k)
        export.write_csv(p, ["quantity", "value"], rows)


def _timed(number: int, title: str):
    def wrap(fn):
        def run(cfg: VerifyConfig) -> CriterionResult:
            t0 = time.perf_counter()
            checks, values = fn(cfg)
            res = CriterionResult(number, title, checks, values, time.perf_counter() - t0)
            _summary_csv(cfg, number, values)
            return res
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


@_timed(1, "exact coincidence classes")
def check_1(cfg: VerifyConfig):
    t0 = time.perf_counter()
    found = coincidence_search(5, SystemParams.create("1/2", "4/3"))
    none = coincidence_search(8, SystemParams.create("1/2", "3/2"))
    elapsed = time.perf_counter() - t0
    words = [sorted(str(w) for w in c.words) for c in found]
    one = len(found) == 1
    checks = {
        "single class at (1/2,4/3)": one,
        "class is {10001,00110}": one and words[0] == ["00110", "10001"],
        "map is (2/9,7/6)": one and (found[0].slope, found[0].intercept) == (Fraction(2, 9), Fraction(7, 6)),
        "none at (1/2,3/2) up to length 8": len(none) == 0,
        "runtime < 1 s": elapsed < 1.0,
    }
    return checks, {"classes_4_3": len(found), "classes_3_2": len(none), "search_seconds": elapsed}


def _stationary_main(cfg: VerifyConfig):
    params = SystemParams.create("1/2", "5/4")
    return params, solve_stationary(0.6, params, N=cfg.grid)


@_timed(2, "stationary moments")
def check_2(cfg: VerifyConfig):
    t0 = time.perf_counter()
    params, mu = _stationary_main(cfg)
    elapsed = time.perf_counter() - t0
    m1, m2 = mu.mean(), mu.moment(2)
    o1, o2 = moment_oracle(0.6, params, 1), moment_oracle(0.6, params, 2)
    res = fixed_point_residual(mu, 0.6, params)
    p = cfg.path("stationary_grid.csv")
    if p is not None:
        export.write_grid(mu, p, {"mean": m1, "second_moment": m2})
    checks = {
        "mean within 0.01 of oracle": abs(m1 - o1) <= 0.01,
        "second moment within 0.1 of oracle": abs(m2 - o2) <= 0.1,
        "fixed-point residual <= 1e-6": res <= 1e-6,
        "runtime < 30 s": elapsed < 30.0,
    }
    return checks, {"mean": m1, "second_moment": m2, "oracle_mean": o1, "oracle_second_moment": o2,
                    "residual": res, "iterations": mu.meta["iterations"], "solve_seconds": elapsed}


@_timed(3, "sphere average vs path average")
def check_3(cfg: VerifyConfig):
    t0 = time.perf_counter()
    params = SystemParams.create("1/2", "5/4")
    out = {}
    for name, nu in (("bernoulli", ShiftMeasure.bernoulli(0.6)), ("markov", ShiftMeasure.markov(MARKOV_P))):
        sph = sphere_measure(nu, 1.0, 20, params, workers=cfg.workers)
        pa = path_average(nu, 1.0, 10 ** 6, cfg.seed, params, stream=3)
        out[name] = kolmogorov_distance(sph, pa)
        p = cfg.path(f"sphere20_{name}.csv")
        if p is not None:
            export.write_columns(p, {"quantile": np.linspace(0.01, 0.99, 99),
                                     "sphere": _quantiles(sph), "path": _quantiles(pa)})
    elapsed = time.perf_counter() - t0
    checks = {
        "Bernoulli distance <= 0.02": out["bernoulli"] <= 0.02,
        "Markov distance <= 0.05": out["markov"] <= 0.05,
        "runtime < 60 s": elapsed < 60.0,
    }
    return checks, {"d_bernoulli": out["bernoulli"], "d_markov": out["markov"], "seconds": elapsed}


def _quantiles(m, qs=np.linspace(0.01, 0.99, 99)) -> np.ndarray:
    xs, cw = m._cum()
    idx = np.minimum(np.searchsorted(cw, qs - 1e-15, side="left"), xs.size - 1)
    return xs[idx]


@_timed(4, "start-point independence")
def check_4(cfg: VerifyConfig):
    params = SystemParams.create("1/2", "5/4")
    nu = ShiftMeasure.bernoulli(0.6)
    ns = [4, 8, 12, 16, 20]
    ds = [kolmogorov_distance(sphere_measure(nu, 1.0, n, params, workers=cfg.workers),
                              sphere_measure(nu, 100.0, n, params, workers=cfg.workers)) for n in ns]
    mono = all(d1 <= 1.1 * d0 for d0, d1 in zip(ds, ds[1:]))
    checks = {"d(mu_20,1, mu_20,100) <= 0.05": ds[-1] <= 0.05,
              "non-increasing with 10% slack": mono}
    return checks, {f"d_n{n}": d for n, d in zip(ns, ds)}


@_timed(5, "existence threshold")
def check_5(cfg: VerifyConfig):
    params = SystemParams.create("1/2", "3")
    try:
        solve_stationary(0.5, params, N=1024)
        refused = False
    except PositiveLyapunovError:
        refused = True
    pa = path_average(ShiftMeasure.bernoulli(0.5), 1.0, 10 ** 5, cfg.seed, params, stream=5)
    mass = float(pa.cdf(100.0))
    return ({"solver refuses with Lyapunov error": refused, "mass on [0,100] <= 0.05": mass <= 0.05},
            {"mass_0_100": mass})


@_timed(6, "contraction along words")
def check_6(cfg: VerifyConfig):
    params = SystemParams.create("1/2", "3/2")
    nu = ShiftMeasure.bernoulli(0.5)
    rng = rng_for(cfg.seed, 6)
    pts = rng.uniform(1.0, 5.0, size=(100, 2))
    mono = quarter = True
    worst = 0.0
    for i, (x, y) in enumerate(pts):
        tab = contraction_diagnostics(float(x), float(y), sample_path(nu, 200, cfg.seed, 600 + i), params)
        mono &= tab.log_nonincreasing
        quarter &= tab.quarter_bound
        worst = max(worst, tab.final_distance)
    small = worst <= 1e-6
    return ({"log distance non-increasing (exact)": mono, "d <= |ln x - ln y|/4": quarter,
             "final d <= 1e-6": small}, {"worst_final_d": worst})


ACIM_GAMMAS = (1.5, 2.0, 3.0)


@_timed(7, "absolutely continuous invariant measures")
def check_7(cfg: VerifyConfig):
    params = SystemParams.create("1/2", "3/2")
    checks, values, hulls = {}, {}, []
    for g in ACIM_GAMMAS:
        t0 = time.perf_counter()
        sys = acim.AcimSystem(params, g)
        dens = acim.ulam_density(sys, cfg.bins)
        sup = acim.support_intervals(dens)
        elapsed = time.perf_counter() - t0
        h = sup.bin_width
        hulls.append(sup.hull)
        checks[f"g={g}: residual <= 1e-8"] = dens.residual <= 1e-8
        checks[f"g={g}: hull within one bin"] = (abs(sup.hull[0] - sys.lo) <= h
                                                  and abs(sup.hull[1] - sys.hi) <= h)
        checks[f"g={g}: gamma interior to support"] = sup.contains_in_interior(g)
        checks[f"g={g}: runtime < 60 s"] = elapsed < 60.0
        values.update({f"residual_g{g}": dens.residual, f"hull_lo_g{g}": sup.hull[0],
                       f"hull_hi_g{g}": sup.hull[1], f"components_g{g}": len(sup.intervals),
                       f"seconds_g{g}": elapsed})
        p = cfg.path(f"ulam_density_g{g}.csv")
        if p is not None:
            export.write_columns(p, {"bin_left": dens.edges[:-1], "bin_right": dens.edges[1:],
                                     "mass": dens.masses})
            export.write_json(p.with_name(f"support_g{g}.json"), sup.to_dict())
    checks["hulls pairwise distinct"] = len(set(hulls)) == len(hulls)
    return checks, values


@_timed(8, "shift measure round trip")
def check_8(cfg: VerifyConfig):
    params = SystemParams.create("1/2", "3/2")
    sys = acim.AcimSystem(params, 2.0)
    dens = acim.ulam_density(sys, cfg.bins)
    table = acim.nu_gamma_cylinders(sys, 10, 10 ** 6, cfg.seed, density=dens)
    d = acim.roundtrip_distance(sys, 10, table, dens, x=1.0)
    lam = table.lyapunov(params)
    p = cfg.path("nu_gamma_depth10.csv")
    if p is not None:
        export.write_columns(p, {"word_index": np.arange(table.freq.size), "mass": table.freq})
    return ({"distance <= 0.05": d <= 0.05, "depth-1 Lyapunov < 0": lam < 0},
            {"distance": d, "lyapunov": lam})


ROTATION_PAIRS = (("1/2", "3/2"), ("1/3", "5/4"), ("0.7", "1.1"))


@_timed(9, "rotation number")
def check_9(cfg: VerifyConfig):
    checks, values = {}, {}
    for a, b in ROTATION_PAIRS:
        params = SystemParams.create(a, b)
        f, n = rotation_number(params), rotation_number_numeric(params, 10 ** 6)
        checks[f"({a},{b}) within 1e-5"] = abs(f - n) <= 1e-5
        values[f"formula_{a}_{b}"] = f
        values[f"numeric_{a}_{b}"] = n
    return checks, values


def random_intervals(n: int, seed: int) -> list[tuple[float, float]]:
    """Centres uniform in [0.1, 50], lengths log-uniform in [1e-4, 1] capped at the centre."""
    rng = rng_for(seed, 10)
    c = rng.uniform(0.1, 50.0, n)
    L = np.minimum(10.0 ** rng.uniform(-4.0, 0.0, n), c)
    return [(float(ci - li / 2), float(ci + li / 2)) for ci, li in zip(c, L)]


def grid_mass_widened(mu, lo: float, hi: float, cells: int = 2) -> float:
    """mu([lo, hi]) with the interval widened by ``cells`` u-cells on each side."""
    du = cells / mu.N
    x_hi = float(from_u(max(float(to_u(hi)) - du, 0.0)))
    x_lo = float(from_u(min(float(to_u(lo)) + du, 1.0)))
    return float(mu.cdf(x_hi) - mu.cdf_left(x_lo))


@_timed(10, "Hölder certificates")
def check_10(cfg: VerifyConfig):
    params, p = SystemParams.create("1/2", "3/2"), 0.5
    mu = solve_stationary(p, params, N=cfg.grid)
    base = float(mu.cdf(1.0 / params.a))
    incl = length = lower = True
    rows = []
    for lo, hi in random_intervals(100, cfg.seed):
        cert = holder_certificate(lo, hi, p, params)
        bound = cert.measure_lower_bound(base)
        mass = grid_mass_widened(mu, lo, hi)
        incl &= cert.inclusion_holds()
        length &= cert.length_bound_holds()
        lower &= mass >= bound
        rows.append((lo, hi, cert.k, cert.m, cert.eq7_rhs, mass, bound))
    p_ = cfg.path("holder_certificates.csv")
    if p_ is not None:
        export.write_csv(p_, ["lo", "hi", "k", "m", "length_bound", "grid_mass", "lower_bound"], rows)
    return ({"inclusion exact": incl, "k+m below length bound": length,
             "mu(I) >= q^(k+m) mu([0,1/a])": lower},
            {"mu_0_inv_a": base, "max_k_plus_m": max(r[2] + r[3] for r in rows)})


@_timed(11, "universal approximation sequence")
def check_11(cfg: VerifyConfig):
    params = SystemParams.create("1/2", "3/2")
    target = TruncatedExponential(1.0, 10.0)
    N = 2000
    try:
        els = steering.approx_sequence(target, N, params, cfg.seed, workers=cfg.workers)
        per_element = all(el.error < 1.0 / el.index and el.slope < 1.0 / el.index for el in els)
    except steering.SteeringError:
        return {"contraction inequalities per element": False}, {}
    words = [el.word for el in els]
    d = steering.distance_to(words, 1.0, target, params)
    inter = list(steering.exhaustive_interleave(words))
    first = {str(w) for w in inter[:250]}
    short = [str(w) for w in steering.insertion_positions(3)]
    d_int = steering.distance_to(inter[:N], 1.0, target, params)
    p = cfg.path("approx_sequence.txt")
    if p is not None:
        steering.write_sequence(els, p)
        export.write_columns(p.with_name("approx_sequence.csv"),
                             {"index": [el.index for el in els], "target": [el.target for el in els],
                              "image": [el.image for el in els], "slope": [el.slope for el in els]})
    return ({"contraction inequalities per element": per_element, "distance <= 0.05": d <= 0.05,
             "all words of length <= 3 in first 250": all(w in first for w in short),
             "interleaved within 0.02": abs(d_int - d) <= 0.02},
            {"distance": d, "distance_interleaved": d_int})


CHECKS = {1: check_1, 2: check_2, 3: check_3, 4: check_4, 5: check_5, 6: check_6,
          7: check_7, 8: check_8, 9: check_9, 10: check_10, 11: check_11}


def run_criteria(cfg: VerifyConfig, numbers=None) -> list[CriterionResult]:
    numbers = sorted(CHECKS) if numbers is None else numbers
    return [CHECKS[n](cfg) for n in numbers]


def compare_csvs(dir1: Path, dir2: Path) -> tuple[list[str], list[str]]:
    """Names of CSV files present in both directories, and those that differ."""
    names = sorted(p.name for p in Path(dir1).glob("*.csv"))
    other = sorted(p.name for p in Path(dir2).glob("*.csv"))
    differ = [n for n in names if n not in other or not filecmp.cmp(Path(dir1) / n, Path(dir2) / n, shallow=False)]
    differ += [n for n in other if n not in names]
    return names, differ


def check_12(cfg: VerifyConfig, reference: Path | None = None, numbers=None) -> CriterionResult:
    """Run the suite into a fresh directory and compare every CSV byte for byte with
    ``reference`` (a previous run with the same seed), or with a second fresh run."""
    t0 = time.perf_counter()
    with tempfile.TemporaryDirectory() as tmp:
        dirs = [Path(tmp) / "run1", Path(tmp) / "run2"]
        if reference is not None:
            dirs[0] = Path(reference)
        else:
            run_criteria(VerifyConfig(cfg.seed, dirs[0], cfg.workers, cfg.grid, cfg.bins), numbers)
        run_criteria(VerifyConfig(cfg.seed, dirs[1], cfg.workers, cfg.grid, cfg.bins), numbers)
        names, differ = compare_csvs(dirs[0], dirs[1])
    checks = {"CSV files produced": len(names) > 0, "byte-identical CSVs": not differ}
    return CriterionResult(12, "determinism", checks, {"csv_files": len(names), "differing": differ},
                           time.perf_counter() - t0)


def run_all(cfg: VerifyConfig) -> list[CriterionResult]:
    """Criteria 1-11 into ``cfg.out`` (a temporary directory if unset), then 12 against it."""
    if cfg.out is None:
        with tempfile.TemporaryDirectory() as tmp:
            return run_all(VerifyConfig(cfg.seed, Path(tmp), cfg.workers, cfg.grid, cfg.bins))
    results = run_criteria(cfg)
    results.append(check_12(cfg, reference=Path(cfg.out)))
    return results


def table(results: list[CriterionResult]) -> str:
    lines = [r.line() for r in results]
    n_pass = sum(r.passed for r in results)
    lines.append(f"{n_pass}/{len(results)} criteria passed")
    return "\n".join(lines)
