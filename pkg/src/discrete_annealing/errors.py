"""Exception hierarchy for the discrete annealing toolkit.

Every error raised by the library derives from :class:`AnnealingError` so
callers (and the CLI) can separate library failures from programming errors.
Structural validation failures additionally subclass ``ValueError``.
"""

from __future__ import annotations


class AnnealingError(Exception):
    """Base class for all library errors."""


# ---------------------------------------------------------------------------
# Structural validation
# ---------------------------------------------------------------------------


class InvalidGraph(AnnealingError, ValueError):
    """State graph is malformed (self-loop, unknown state, duplicate label)."""


class InvalidDistribution(AnnealingError, ValueError):
    """Vector is not a strictly positive normalized distribution."""


class InvalidKernel(AnnealingError, ValueError):
    """Rate kernel violates sign, row-sum, or support constraints."""


class InvalidMassRate(AnnealingError, ValueError):
    """Mass-rate vector does not sum to zero."""


# ---------------------------------------------------------------------------
# Transport
# ---------------------------------------------------------------------------


class DisconnectedCapacity(AnnealingError):
    """The strictly positive capacity subgraph is disconnected."""


class SingularSolve(AnnealingError):
    """A linear solve failed or missed its residual bound."""


class ZeroCapacityEdge(AnnealingError):
    """Nonzero flux was placed on an edge with zero capacity."""


class ActionUnavailable(AnnealingError):
    """The action of a curve could not be computed."""


# ---------------------------------------------------------------------------
# Markov chains
# ---------------------------------------------------------------------------


class NotReversible(AnnealingError):
    """Detailed balance fails; carries the worst edge and its ratio."""

    def __init__(self, message: str, edge: tuple[int, int] | None = None, ratio: float = 0.0):
        super().__init__(message)
        self.edge = edge
        self.ratio = ratio


class AbsoluteContinuity(AnnealingError):
    """Reference measure vanishes where the first measure does not."""


class TooLargeForGrid(AnnealingError):
    """Exact grid search requested on a state space that is too large."""


class BrokenPath(AnnealingError):
    """A routing path is not edge-contiguous, not simple, or misses its endpoints."""


class IntegrationFailed(AnnealingError):
    """An ODE integration of a marginal flow did not converge."""


class StiffnessWarning(UserWarning):
    """A matrix exponential needed more squarings than the configured limit."""


# ---------------------------------------------------------------------------
# Path measures and annealing
# ---------------------------------------------------------------------------


class NegativeRate(AnnealingError, ValueError):
    """A rate argument was negative."""


class SupportMismatch(AnnealingError):
    """First kernel is positive where the reference kernel vanishes."""


class RateCapExceeded(AnnealingError):
    """A rate exceeds the configured uniform bound."""


class NonStochasticRow(AnnealingError):
    """A transition-matrix row does not sum to one."""


class ZeroRateEdge(AnnealingError):
    """A kernel family loses or gains support between probed parameters."""


# ---------------------------------------------------------------------------
# Models
# ---------------------------------------------------------------------------


class TooLarge(AnnealingError):
    """Requested enumeration exceeds the configured state-space cap."""


class PreconditionBeta(AnnealingError):
    """Inverse temperature is below the regime an operation requires."""


class UnbalancedD(AnnealingError):
    """Mass-rate vector handed to the greedy flux does not sum to zero."""


class SymmetryViolation(AnnealingError):
    """A projection does not preserve the symmetry of the chain."""


class BoundViolation(AnnealingError):
    """A proved bound failed numerically."""
