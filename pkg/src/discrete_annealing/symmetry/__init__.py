"""Projection machinery: pushforwards, projected capacities and symmetry checks."""

from discrete_annealing.symmetry.projection import Projection, project_capacity, project_measure
from discrete_annealing.symmetry.verify import (
    compare_actions,
    compare_metric_derivative,
    verify_symmetry,
)

__all__ = [
    "Projection",
    "compare_actions",
    "compare_metric_derivative",
    "project_capacity",
    "project_measure",
    "verify_symmetry",
]
