"""Finite state spaces as NetworkX-backed graphs.

Holds the state graph, the positive distributions, mass rates, capacities and
fluxes defined on it, and connectivity / Laplacian analysis of capacities.
"""

from discrete_annealing.graph.analysis import CapacityAnalyzer, is_connected
from discrete_annealing.graph.measures import (
    Capacity,
    Flux,
    MassRate,
    ProbVector,
    divergence,
)
from discrete_annealing.graph.state_graph import StateGraph

__all__ = [
    "Capacity",
    "CapacityAnalyzer",
    "Flux",
    "MassRate",
    "ProbVector",
    "StateGraph",
    "divergence",
    "is_connected",
]
