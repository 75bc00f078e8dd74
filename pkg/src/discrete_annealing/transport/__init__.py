"""Discrete transport along curves of measures.

Continuity-equation potentials, optimal fluxes and squared metric
derivatives, the fixed-capacity distance W_{c,2}, and the action of a curve.
"""

from discrete_annealing.transport.action import (
    CurveSpec,
    action,
    gibbs_curve,
    squared_speed,
)
from discrete_annealing.transport.potential import (
    Potential,
    flux_cost,
    metric_derivative_sq,
    solve_continuity_potential,
    wc2_distance,
)

__all__ = [
    "CurveSpec",
    "Potential",
    "action",
    "flux_cost",
    "gibbs_curve",
    "metric_derivative_sq",
    "solve_continuity_potential",
    "squared_speed",
    "wc2_distance",
]
