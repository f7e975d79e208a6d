"""CSV / JSON emission.  Floats are printed with 17 significant digits so that
byte comparison of two runs is a meaningful determinism check."""

from __future__ import annotations

import json
import math
import platform
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .measures import GridMeasure, PointMassMeasure


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return "%.17g" % v
    return str(v)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def write_columns(path: Path, columns: dict[str, np.ndarray]) -> Path:
    """Vectorized CSV writer for equal-length float columns."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    arr = np.column_stack([np.asarray(c, dtype=float) for c in columns.values()])
    with open(path, "w") as fh:
        fh.write(",".join(columns) + "\n")
        np.savetxt(fh, arr, fmt="%.17g", delimiter=",")
    return path


def jsonable(v):
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.ndarray):
        return jsonable(v.tolist())
    return v


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path


def write_grid(mu: GridMeasure, path: Path, extra: dict | None = None) -> Path:
    """``u,x,cdf`` rows for every grid node plus a ``.json`` sidecar."""
    path = write_columns(path, {"u": mu.u_nodes, "x": mu.x_nodes, "cdf": mu.cdf_nodes})
    side = {k: mu.meta.get(k) for k in ("a", "b", "p", "N", "tol", "residual")}
    side["N"] = mu.N
    side["mass_at_infinity"] = mu.mass_at_infinity
    side.update(extra or {})
    write_json(path.with_suffix(".json"), side)
    return path


def read_grid(path: Path) -> GridMeasure:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    side = json.loads(Path(path).with_suffix(".json").read_text())
    return GridMeasure(data[:, 2], float(side.get("mass_at_infinity", 0.0)), side)


def write_point_cdf(m: PointMassMeasure, path: Path) -> Path:
    """Distinct atom locations with their cumulative mass."""
    xs, cw = m._cum()
    return write_columns(path, {"x": xs, "cdf": cw})


def versions() -> dict:
    import scipy

    from . import __version__
    return {"python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__, "affine_semigroup": __version__}
