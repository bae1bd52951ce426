"""
Exception hierarchy shared by every package in the project.

Input-shaped errors also derive from ValueError so callers that only know
about the builtin can still catch them.
"""

from __future__ import annotations

from typing import Any, Optional


class OptimizationError(Exception):
    """Base class for all project errors"""


class ConfigError(OptimizationError, ValueError):
    """Invalid configuration, experiment file or command-line value"""


class BoundsError(ConfigError):
    """Non-finite or inverted search-space bounds"""


class EmptySpaceError(ConfigError):
    """Search space with no dimensions"""


class DomainTooSmall(ConfigError):
    """Initial tumour does not fit the simulation domain"""


class DimensionMismatch(OptimizationError, ValueError):
    """Vector length differs from the search-space dimension"""


class EmptyPopulation(OptimizationError, ValueError):
    """Operation needs at least one individual"""


class PopulationTooSmall(OptimizationError, ValueError):
    """Population too small for the requested operator"""


class OutOfBoundsGenome(OptimizationError, ValueError):
    """Genome outside the feasible box"""


class BudgetExhausted(OptimizationError):
    """No design evaluations left in the ledger"""


class EvaluatorFailure(OptimizationError):
    """An objective evaluation could not produce a value"""


class ProtocolError(EvaluatorFailure):
    """External evaluator answered with a malformed response"""


class EvaluatorTimeout(EvaluatorFailure):
    """External evaluator did not answer in time"""


class NonZeroExit(EvaluatorFailure):
    """External evaluator process exited with an error status"""


class NumericalInstability(EvaluatorFailure):
    """Simulation state became non-finite"""


class RunAborted(EvaluatorFailure):
    """A run stopped on an evaluator failure; the partial log is attached"""

    def __init__(self, message: str, partial_log: Optional[Any] = None):
        super().__init__(message)
        self.partial_log = partial_log

    def __reduce__(self):
        return (self.__class__, (str(self), self.partial_log))


class AuditFailure(OptimizationError):
    """A run log violates one of its bookkeeping invariants"""


class ExportError(OptimizationError, OSError):
    """Result files could not be written"""
