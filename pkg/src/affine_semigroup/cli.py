"""Command line front end: ``affine-semigroup <subcommand> [flags]``.

Every subcommand writes its artifacts plus a ``run.json`` manifest into ``--out``.
Parameters come from defaults, then ``--config FILE`` (a JSON document, or a
previous ``run.json``), then explicit flags.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path


from . import acim_lab as acim
from . import export, steering, verify
from .affine_core import SystemParams, coincidence_search, parse_real
from .measures import TruncatedExponential
from .shift_measures import ShiftMeasure, lyapunov
from .skew_dynamics import path_average
from .sphere_averages import DEFAULT_DEPTH_CAP, sphere_measure
from .stationary_solver import (CertificateError, MomentDivergenceError, NonConvergenceError,
                                PositiveLyapunovError, holder_certificate, moment_oracle,
                                rotation_number, rotation_number_numeric, solve_stationary)

DEFAULTS = {
    "a": "1/2", "b": "5/4", "p": 0.6, "markov": None, "gamma": 2.0, "n": None,
    "grid": 2 ** 16, "bins": 4096, "seed": 20240601, "workers": None, "tol": 1e-6,
    "out": "out", "x": 1.0, "y": 10.0, "eps": 0.1, "lo": 9.95, "hi": 10.05,
    "max_len": 5, "iters": 1_000_000, "depth": 10, "samples": 1_000_000, "upper": 10.0,
}

# per-subcommand defaults for n
N_DEFAULT = {"sphere-avg": 20, "path-avg": 1_000_000, "approx-seq": 2000}

SUBCOMMANDS = ["stationary", "sphere-avg", "path-avg", "acim", "steer", "approx-seq",
               "coincidence", "holder-cert", "rotation", "verify"]


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    doc = json.loads(Path(path).read_text())
    if not isinstance(doc, dict):
        raise ConfigError(["config: top level must be a JSON object"])
    # a run manifest carries the resolved config under "config"
    doc = doc.get("config", doc)
    unknown = sorted(set(doc) - set(DEFAULTS))
    if unknown:
        raise ConfigError([f"{k}: unknown field" for k in unknown])
    return doc


def resolve(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    cfg["n"] = N_DEFAULT.get(args.command)
    cfg.update(load_config(args.config))
    for k in DEFAULTS:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    if cfg["workers"] is None:
        cfg["workers"] = os.cpu_count() or 1
    validate(cfg)
    return cfg


def validate(cfg: dict) -> None:
    problems = []

    def num(key, cond, msg, parse=float):
        try:
            v = parse(cfg[key])
        except (TypeError, ValueError, ZeroDivisionError):
            problems.append(f"{key}: not a number ({cfg[key]!r})")
            return
        if not cond(v):
            problems.append(f"{key}: {msg} (got {cfg[key]!r})")

    real = lambda v: float(parse_real(v))  # noqa: E731
    num("a", lambda v: 0 < v < 1, "must satisfy 0 < a < 1", real)
    num("b", lambda v: v > 1, "must exceed 1", real)
    num("p", lambda v: 0 < v < 1, "must satisfy 0 < p < 1")
    num("gamma", lambda v: v > 1, "must exceed 1")
    num("grid", lambda v: v >= 2, "must be at least 2", int)
    num("bins", lambda v: v >= 64, "must be at least 64", int)
    num("tol", lambda v: v > 0, "must be positive")
    num("workers", lambda v: v >= 1, "must be at least 1", int)
    num("seed", lambda v: v >= 0, "must be nonnegative", int)
    num("eps", lambda v: v > 0, "must be positive")
    num("max_len", lambda v: v >= 1, "must be at least 1", int)
    num("iters", lambda v: v >= 1, "must be at least 1", int)
    num("depth", lambda v: 0 <= v <= 10, "must be between 0 and 10", int)
    if cfg["n"] is not None:
        num("n", lambda v: v >= 0, "must be nonnegative", int)
    if cfg["markov"] is not None:
        try:
            ShiftMeasure.markov(cfg["markov"])
        except (TypeError, ValueError) as exc:
            problems.append(f"markov: {exc}")
    if problems:
        raise ConfigError(problems)


def params_of(cfg: dict) -> SystemParams:
    return SystemParams.create(cfg["a"], cfg["b"])


def shift_of(cfg: dict) -> ShiftMeasure:
    if cfg["markov"] is not None:
        return ShiftMeasure.markov(cfg["markov"])
    return ShiftMeasure.bernoulli(float(cfg["p"]))


def _stationary(cfg, out: Path) -> dict:
    params, p = params_of(cfg), float(cfg["p"])
    mu = solve_stationary(p, params, N=int(cfg["grid"]), tol=float(cfg["tol"]))
    extra = {"mean": mu.mean(), "second_moment": mu.moment(2), "iterations": mu.meta["iterations"]}
    for order, key in ((1, "oracle_mean"), (2, "oracle_second_moment")):
        try:
            extra[key] = moment_oracle(p, params, order)
        except MomentDivergenceError:
            extra[key] = float("inf")
    export.write_grid(mu, out / "stationary.csv", extra)
    return {"mean": extra["mean"], "second_moment": extra["second_moment"],
            "residual": mu.meta["residual"]}


def _sphere(cfg, out: Path) -> dict:
    n = int(cfg["n"])
    prune = 1e-12 if n > DEFAULT_DEPTH_CAP else None
    m = sphere_measure(shift_of(cfg), float(cfg["x"]), n, params_of(cfg),
                       workers=int(cfg["workers"]), prune_below=prune)
    export.write_point_cdf(m, out / "sphere.csv")
    return {"atoms": len(m), "mean": m.mean(), "pruned": prune is not None}


def _path(cfg, out: Path) -> dict:
    m = path_average(shift_of(cfg), float(cfg["x"]), int(cfg["n"]), int(cfg["seed"]), params_of(cfg))
    export.write_point_cdf(m, out / "path.csv")
    return {"steps": len(m), "mean": m.mean(), "lyapunov": lyapunov(shift_of(cfg), params_of(cfg))}


def _acim(cfg, out: Path) -> dict:
    sys_ = acim.AcimSystem(params_of(cfg), float(cfg["gamma"]))
    dens = acim.ulam_density(sys_, int(cfg["bins"]))
    sup = acim.support_intervals(dens)
    export.write_columns(out / "density.csv", {"bin_left": dens.edges[:-1],
                                               "bin_right": dens.edges[1:], "mass": dens.masses})
    export.write_json(out / "support.json", sup.to_dict())
    return {"residual": dens.residual, "iterations": dens.iterations, "hull": list(sup.hull),
            "components": len(sup.intervals)}


def _steer(cfg, out: Path) -> dict:
    res = steering.steer(float(cfg["x"]), float(cfg["y"]), float(cfg["eps"]), params_of(cfg))
    info = {"word": str(res.word), "image": res.image, "error": res.error, "slope": res.slope,
            "leading_zeros": res.leading_zeros, "orbit_min": res.orbit_min, "orbit_max": res.orbit_max}
    export.write_json(out / "steer.json", info)
    return info


def _approx(cfg, out: Path) -> dict:
    target = TruncatedExponential(1.0, float(cfg["upper"]))
    params = params_of(cfg)
    els = steering.approx_sequence(target, int(cfg["n"]), params, int(cfg["seed"]),
                                   workers=int(cfg["workers"]))
    steering.write_sequence(els, out / "sequence.txt")
    d = steering.distance_to([el.word for el in els], 1.0, target, params)
    return {"elements": len(els), "distance_to_target": d}


def _coincidence(cfg, out: Path) -> dict:
    params = params_of(cfg)
    if not params.exact:
        params = params.as_exact()
    classes = coincidence_search(int(cfg["max_len"]), params, workers=int(cfg["workers"]))
    doc = {"a": str(params.a_exact), "b": str(params.b_exact), "max_len": int(cfg["max_len"]),
           "classes": [c.to_dict() for c in classes]}
    export.write_json(out / "coincidence.json", doc)
    return {"classes": len(classes)}


def _holder(cfg, out: Path) -> dict:
    cert = holder_certificate(float(cfg["lo"]), float(cfg["hi"]), float(cfg["p"]), params_of(cfg))
    export.write_json(out / "holder.json", cert.to_dict())
    return {"k": cert.k, "m": cert.m, "inclusion_holds": cert.inclusion_holds(),
            "length_bound_holds": cert.length_bound_holds()}


def _rotation(cfg, out: Path) -> dict:
    params = params_of(cfg)
    doc = {"formula": rotation_number(params),
           "numeric": rotation_number_numeric(params, int(cfg["iters"]))}
    doc["difference"] = abs(doc["formula"] - doc["numeric"])
    export.write_json(out / "rotation.json", doc)
    return doc


def _verify(cfg, out: Path) -> dict:
    vc = verify.VerifyConfig(seed=int(cfg["seed"]), out=out / "verify", workers=int(cfg["workers"]),
                             grid=int(cfg["grid"]), bins=int(cfg["bins"]))
    results = verify.run_all(vc)
    print(verify.table(results))
    export.write_csv(out / "verify.csv", ["criterion", "title", "passed"],
                     [(r.number, r.title, r.passed) for r in results])
    export.write_json(out / "verify.json", [r.to_dict() for r in results])
    return {"passed": sum(r.passed for r in results), "total": len(results),
            "all_passed": all(r.passed for r in results)}


HANDLERS = {"stationary": _stationary, "sphere-avg": _sphere, "path-avg": _path, "acim": _acim,
            "steer": _steer, "approx-seq": _approx, "coincidence": _coincidence,
            "holder-cert": _holder, "rotation": _rotation, "verify": _verify}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("parameters")
    g.add_argument("--a", help="contraction slope, float or num/den")
    g.add_argument("--b", help="expansion slope, float or num/den")
    g.add_argument("--p", type=float, help="Bernoulli probability of symbol 0")
    g.add_argument("--gamma", type=float)
    g.add_argument("--n", type=int, help="depth, steps or sequence length")
    g.add_argument("--grid", type=int, help="u-grid size N")
    g.add_argument("--bins", type=int, help="Ulam bins K")
    g.add_argument("--seed", type=int)
    g.add_argument("--workers", type=int)
    g.add_argument("--tol", type=float)
    g.add_argument("--out", help="output directory")
    g.add_argument("--config", help="JSON config or run.json manifest")
    g.add_argument("--x", type=float, help="start point")
    g.add_argument("--y", type=float, help="steering target")
    g.add_argument("--eps", type=float, help="steering tolerance")
    g.add_argument("--lo", type=float, help="certificate interval left end")
    g.add_argument("--hi", type=float, help="certificate interval right end")
    g.add_argument("--max-len", dest="max_len", type=int)
    g.add_argument("--iters", type=int)

    parser = argparse.ArgumentParser(prog="affine-semigroup", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
    except ConfigError as exc:
        for line in exc.problems:
            print(f"config error: {line}", file=sys.stderr)
        return 2
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    try:
        summary = HANDLERS[args.command](cfg, out)
        status = 0
        if args.command == "verify" and not summary["all_passed"]:
            status = 1
    except (PositiveLyapunovError, NonConvergenceError, CertificateError,
            steering.SteeringError, acim.PowerIterationError, acim.InsufficientSamplesError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        summary, status = {"error": str(exc), "error_type": type(exc).__name__}, 1
    manifest = {"command": args.command, "config": cfg, "versions": export.versions(),
                "wall_seconds": time.perf_counter() - t0, "exit_status": status, "summary": summary}
    export.write_json(out / "run.json", manifest)
    if args.command != "verify":
        print(json.dumps(export.jsonable(summary), indent=2, sort_keys=True))
    return status


if __name__ == "__main__":
    sys.exit(main())
