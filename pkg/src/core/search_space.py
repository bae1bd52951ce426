"""
Search-space definition and genome arithmetic.

Genomes are plain float64 numpy vectors marked read-only, so they can be
shared between workers without copying.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt

from src.core.exceptions import BoundsError, DimensionMismatch, EmptySpaceError
from src.core.rng import RngLike, as_generator


Genome = npt.NDArray[np.float64]


@dataclass(frozen=True)
class Dimension:
    name: str
    lo: float
    hi: float
    unit: str = ""

    @property
    def width(self) -> float:
        return self.hi - self.lo


DimensionSpec = Union[Dimension, Tuple[float, float], Tuple[str, float, float], Tuple[str, float, float, str]]


@dataclass(frozen=True)
class SearchSpace:
    """Box of per-dimension bounds. Build it through space_new()."""

    dims: Tuple[Dimension, ...]

    @property
    def D(self) -> int:
        return len(self.dims)

    @property
    def names(self) -> list[str]:
        return [d.name for d in self.dims]

    @property
    def lower(self) -> np.ndarray:
        return np.array([d.lo for d in self.dims], dtype=np.float64)

    @property
    def upper(self) -> np.ndarray:
        return np.array([d.hi for d in self.dims], dtype=np.float64)

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, values: Sequence[float]) -> bool:
        v = np.asarray(values, dtype=np.float64)
        if v.shape != (self.D,):
            return False
        return bool(np.all(v >= self.lower) and np.all(v <= self.upper))

    def to_dict(self) -> list[dict]:
        return [{"name": d.name, "lo": d.lo, "hi": d.hi, "unit": d.unit} for d in self.dims]


def _as_dimension(index: int, spec: DimensionSpec) -> Dimension:
    if isinstance(spec, Dimension):
        return spec
    if isinstance(spec, dict):
        return Dimension(
            name=str(spec.get("name", f"x{index}")),
            lo=float(spec["lo"]),
            hi=float(spec["hi"]),
            unit=str(spec.get("unit", "")),
        )
    items = tuple(spec)
    if len(items) == 2:
        return Dimension(f"x{index}", float(items[0]), float(items[1]))
    if len(items) == 3:
        return Dimension(str(items[0]), float(items[1]), float(items[2]))
    if len(items) == 4:
        return Dimension(str(items[0]), float(items[1]), float(items[2]), str(items[3]))
    raise BoundsError(f"dimension {index}: expected (lo, hi) or (name, lo, hi[, unit]), got {spec!r}")


def space_new(dims: Iterable[DimensionSpec]) -> SearchSpace:
    """Validate bounds and build a SearchSpace."""
    parsed = tuple(_as_dimension(i, d) for i, d in enumerate(dims))
    if not parsed:
        raise EmptySpaceError("search space needs at least one dimension")
    for i, d in enumerate(parsed):
        if not (math.isfinite(d.lo) and math.isfinite(d.hi)):
            raise BoundsError(f"dimension {i} ({d.name}): bounds must be finite, got [{d.lo}, {d.hi}]")
        if d.lo > d.hi:
            raise BoundsError(f"dimension {i} ({d.name}): lower bound {d.lo} exceeds upper bound {d.hi}")
    return SearchSpace(parsed)


def make_genome(values: Sequence[float]) -> Genome:
    """Copy `values` into a read-only float64 vector."""
    g = np.array(values, dtype=np.float64)
    g.setflags(write=False)
    return g


def _check_length(space: SearchSpace, v: np.ndarray) -> None:
    if v.shape != (space.D,):
        raise DimensionMismatch(f"expected a vector of length {space.D}, got shape {v.shape}")


def sample_uniform(space: SearchSpace, rng: RngLike) -> Genome:
    gen = as_generator(rng)
    lo, hi = space.lower, space.upper
    values = lo + gen.random(space.D) * (hi - lo)
    # lo + u*(hi-lo) can round one ulp past hi
    return make_genome(np.minimum(values, hi))


def repair_clamp(space: SearchSpace, v: Sequence[float]) -> Genome:
    """Project every component onto its [lo, hi] interval."""
    arr = np.asarray(v, dtype=np.float64)
    _check_length(space, arr)
    return make_genome(np.clip(arr, space.lower, space.upper))


def repair_reflect(space: SearchSpace, v: Sequence[float]) -> Genome:
    """Fold out-of-bounds components back into the box by mirroring at the bounds."""
    arr = np.asarray(v, dtype=np.float64)
    _check_length(space, arr)
    lo, width = space.lower, space.width
    out = arr.copy()
    moving = width > 0
    period = 2.0 * width[moving]
    t = np.mod(arr[moving] - lo[moving], period)
    t = np.where(t > width[moving], period - t, t)
    out[moving] = lo[moving] + t
    out[~moving] = lo[~moving]
    return make_genome(np.clip(out, lo, space.upper))


def normalize(space: SearchSpace, v: Sequence[float]) -> np.ndarray:
    """Map into the unit box; zero-width dimensions map to 0."""
    arr = np.asarray(v, dtype=np.float64)
    width = space.width
    safe = np.where(width > 0, width, 1.0)
    z = (arr - space.lower) / safe
    z[..., width == 0] = 0.0
    return z


def normalized_distance(space: SearchSpace, a: Sequence[float], b: Sequence[float]) -> float:
    """Euclidean distance of range-normalized coordinates divided by sqrt(D)."""
    va = np.asarray(a, dtype=np.float64)
    vb = np.asarray(b, dtype=np.float64)
    _check_length(space, va)
    _check_length(space, vb)
    diff = normalize(space, va) - normalize(space, vb)
    return float(np.sqrt(np.dot(diff, diff)) / math.sqrt(space.D))
