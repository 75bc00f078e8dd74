"""Path-measure divergences for jump chains.

The change-of-measure KL between two chains, its discrete-time oracle, and the
KL-optimal reference chain that tracks a curve of measures.
"""

from discrete_annealing.girsanov.path_kl import (
    RATE_CAP,
    discrete_path_kl,
    edge_kl_cost,
    kl_rate,
    path_kl,
    path_kl_with_error,
    psi,
)
from discrete_annealing.girsanov.reference import (
    ReferenceChain,
    reference_kernel,
    reference_multipliers,
)

__all__ = [
    "RATE_CAP",
    "ReferenceChain",
    "discrete_path_kl",
    "edge_kl_cost",
    "kl_rate",
    "path_kl",
    "path_kl_with_error",
    "psi",
    "reference_kernel",
    "reference_multipliers",
]
