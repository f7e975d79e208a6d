"""Affine actions of the free two-generator semigroup {x -> a x, x -> b x + 1} on [0, inf)."""

__version__ = "0.1.0"

from .affine_core import AffineMap, SystemParams, Word, compose, coincidence_search  # noqa: E402
from .measures import GridMeasure, PointMassMeasure, kolmogorov_distance  # noqa: E402
from .shift_measures import ShiftMeasure  # noqa: E402

__all__ = [
    "AffineMap", "SystemParams", "Word", "compose", "coincidence_search",
    "GridMeasure", "PointMassMeasure", "kolmogorov_distance", "ShiftMeasure",
]
