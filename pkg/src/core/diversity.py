"""Population diversity metrics in range-normalized coordinates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import pdist, squareform

from src.core.exceptions import DimensionMismatch, EmptyPopulation
from src.core.search_space import SearchSpace, normalize


DEFAULT_DUP_TOL = 1e-9


@dataclass(frozen=True)
class DiversityStats:
    mean_pairwise_distance: float
    duplicate_count: int
    per_dimension_spread: tuple[float, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "mean_pairwise_distance": self.mean_pairwise_distance,
            "duplicate_count": self.duplicate_count,
            "per_dimension_spread": list(self.per_dimension_spread),
        }


def pairwise_distances(space: SearchSpace, pop: Sequence[Sequence[float]]) -> np.ndarray:
    """Condensed vector of normalized distances over all unordered pairs."""
    z = normalize(space, np.asarray(pop, dtype=np.float64))
    if z.shape[0] < 2:
        return np.zeros(0)
    return pdist(z, metric="euclidean") / math.sqrt(space.D)


def diversity(space: SearchSpace, pop: Sequence[Sequence[float]], dup_tol: float = DEFAULT_DUP_TOL) -> DiversityStats:
    """
    Mean pairwise distance, duplicate count and per-dimension spread.

    Duplicates are counted as P minus the number of clusters formed by
    linking every pair closer than or equal to dup_tol (transitively).
    """
    if dup_tol < 0:
        raise ValueError(f"dup_tol must be >= 0, got {dup_tol}")
    arr = np.asarray(pop, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise EmptyPopulation("diversity needs a non-empty population")
    if arr.shape[1] != space.D:
        raise DimensionMismatch(f"population genomes have length {arr.shape[1]}, space has {space.D}")

    P = arr.shape[0]
    dists = pairwise_distances(space, arr)
    mean_distance = float(np.mean(dists)) if dists.size else 0.0

    if P > 1:
        adjacency = csr_matrix(squareform(dists) <= dup_tol)
        n_classes, _ = connected_components(adjacency, directed=False)
    else:
        n_classes = 1

    width = space.width
    raw_spread = arr.max(axis=0) - arr.min(axis=0)
    spread = np.where(width > 0, raw_spread / np.where(width > 0, width, 1.0), 0.0)

    return DiversityStats(
        mean_pairwise_distance=mean_distance,
        duplicate_count=int(P - n_classes),
        per_dimension_spread=tuple(float(s) for s in spread),
    )
