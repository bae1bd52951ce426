"""Analytic objectives used to verify the optimizers. Both have their minimum 0 at the origin."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from src.core.search_space import SearchSpace, space_new


# Conventional box for both functions
BENCHMARK_BOUND = 5.12


def sphere(g: Sequence[float]) -> float:
    x = np.asarray(g, dtype=np.float64)
    return float(np.sum(x * x))


def rastrigin(g: Sequence[float]) -> float:
    x = np.asarray(g, dtype=np.float64)
    return float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x)))


def benchmark_space(dimensions: int, bound: float = BENCHMARK_BOUND) -> SearchSpace:
    return space_new([(f"x{d}", -bound, bound, "") for d in range(dimensions)])
