"""Evaluated individuals, optimizer state and fitness ordering."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.core.search_space import Genome
from src.objectives.evaluation import Fitness


class Algorithm(Enum):
    DE = "de"
    GA = "ga"
    RANDOM = "random"

    @property
    def code(self) -> int:
        """Stable integer tag used in variation stream ids."""
        return {Algorithm.DE: 1, Algorithm.GA: 2, Algorithm.RANDOM: 3}[self]


def rank_value(value: float) -> float:
    """Ordering key: non-finite fitness ranks worse than any finite value."""
    return value if math.isfinite(value) else math.inf


@dataclass(frozen=True)
class EvaluatedIndividual:
    genome: Genome
    fitness: Fitness
    generation: int
    index: int
    algorithm: str

    @property
    def value(self) -> float:
        return self.fitness.value

    @property
    def rank(self) -> float:
        return rank_value(self.fitness.value)


@dataclass(frozen=True)
class MutationEvent:
    generation: int
    target: int
    donors: Tuple[int, ...]


@dataclass
class OptimizerState:
    population: List[EvaluatedIndividual]
    algorithm: Algorithm
    generation: int = 0
    steps: int = 0
    best_ever: Optional[EvaluatedIndividual] = None
    history: List[EvaluatedIndividual] = field(default_factory=list)
    mutation_events: List[MutationEvent] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.population)

    def genomes(self) -> List[Genome]:
        return [ind.genome for ind in self.population]

    def genome_matrix(self) -> np.ndarray:
        return np.vstack([ind.genome for ind in self.population])

    def fitness_values(self) -> np.ndarray:
        return np.array([ind.value for ind in self.population], dtype=np.float64)

    def best_index(self) -> int:
        return int(np.argmin([ind.rank for ind in self.population]))

    def record(self, individuals: Sequence[EvaluatedIndividual]) -> None:
        """Append tested individuals to the history and track the best ever."""
        for ind in individuals:
            self.history.append(ind)
            if self.best_ever is None or ind.rank < self.best_ever.rank:
                self.best_ever = ind
