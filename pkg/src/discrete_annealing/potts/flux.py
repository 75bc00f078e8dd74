"""Greedy matching flux for a balanced mass-rate vector.

Sources (D < 0) and sinks (D > 0) are walked in index order; each step ships
the smaller of the two remaining amounts along the routing path between them
and retires whichever side ran out. The resulting flux solves the continuity
equation D + div J = 0 with at most |sources| + |sinks| routed pairs.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Mapping

import numpy as np
from numpy.typing import ArrayLike

from discrete_annealing.errors import BrokenPath, InvalidGraph, UnbalancedD
from discrete_annealing.graph.measures import Flux, MassRate
from discrete_annealing.graph.state_graph import StateGraph

logger = logging.getLogger(__name__)

BALANCE_TOL = 1e-12

Pair = tuple[int, int]
Routing = Mapping[Pair, list[int]] | Callable[[int, int], list[int]]


class TransportPlan:
    """Masses j(x, y) shipped from sources to sinks, with the path used for each pair."""

    def __init__(self) -> None:
        self.pairs: dict[Pair, float] = {}
        self.paths: dict[Pair, list[int]] = {}

    def add(self, source: int, sink: int, mass: float, path: list[int]) -> None:
        key = (source, sink)
        self.pairs[key] = self.pairs.get(key, 0.0) + mass
        self.paths[key] = path

    @property
    def support_size(self) -> int:
        return sum(1 for v in self.pairs.values() if v > 0.0)

    def total_mass(self) -> float:
        return float(sum(self.pairs.values()))

    def violations(self, rate: MassRate | ArrayLike, tol: float = 1e-12) -> list[str]:
        """Plan properties that fail against the mass-rate vector it was built for."""
        d = np.asarray(rate.values if isinstance(rate, MassRate) else rate, dtype=float)
        scale = tol * max(1.0, float(np.abs(d).sum()))
        found = []
        for (x, y), j in self.pairs.items():
            if j < 0.0:
                found.append(f"negative mass {j:.3g} on ({x}, {y})")
            if j > 0.0 and not (d[x] < 0.0 < d[y]):
                found.append(f"mass on ({x}, {y}) without D(x) < 0 < D(y)")
            if j > min(abs(d[x]), abs(d[y])) + scale:
                found.append(f"mass {j:.3g} on ({x}, {y}) exceeds min(|D(x)|, |D(y)|)")
        if self.support_size > 2 * d.size:
            found.append(f"support {self.support_size} exceeds {2 * d.size}")
        return found

    def __repr__(self) -> str:
        return f"TransportPlan(pairs={self.support_size}, mass={self.total_mass():.4g})"


def _route(routing: Routing, x: int, y: int) -> list[int]:
    if callable(routing):
        return list(routing(x, y))
    if (x, y) in routing:
        return list(routing[(x, y)])
    if (y, x) in routing:
        return list(routing[(y, x)])[::-1]
    raise BrokenPath(f"No routing path between states {x} and {y}")


def route_unit_flow(graph: StateGraph, path: list[int], x: int, y: int) -> np.ndarray:
    """Edge values of a unit flow from x to y along ``path``."""
    if not path or path[0] != x or path[-1] != y:
        raise BrokenPath(f"Path does not run from {x} to {y}")
    flow = np.zeros(graph.num_edges)
    for a, b in zip(path[:-1], path[1:]):
        try:
            eid = graph.edge_id(a, b)
        except InvalidGraph as exc:
            raise BrokenPath(f"Path step ({a}, {b}) is not an edge") from exc
        flow[eid] += 1.0 if a < b else -1.0
    return flow


def greedy_flux(
    graph: StateGraph,
    rate: MassRate | ArrayLike,
    routing: Routing,
    tol: float = BALANCE_TOL,
) -> tuple[Flux, TransportPlan]:
    """Flux J with D + div J = 0 built by greedy source/sink matching.

    ``routing`` gives a directed state path for each (source, sink) pair, as a
    mapping (either orientation) or a callable.
    """
    d = np.array(rate.values if isinstance(rate, MassRate) else rate, dtype=float)
    if d.shape != (graph.size,):
        raise InvalidGraph(f"Mass rate needs {graph.size} entries, got shape {d.shape}")
    imbalance = float(d.sum())
    if abs(imbalance) > tol * max(1.0, float(np.abs(d).sum())):
        raise UnbalancedD(f"Mass rate sums to {imbalance!r}, not 0")

    sources = np.flatnonzero(d < 0.0).tolist()
    sinks = np.flatnonzero(d > 0.0).tolist()
    left = np.abs(d)
    plan = TransportPlan()
    values = np.zeros(graph.num_edges)
    i = k = 0
    while i < len(sources) and k < len(sinks):
        x, y = sources[i], sinks[k]
        mass = min(left[x], left[y])
        path = _route(routing, x, y)
        values += mass * route_unit_flow(graph, path, x, y)
        plan.add(x, y, float(mass), path)
        left[x] -= mass
        left[y] -= mass
        if left[x] == 0.0:
            i += 1
        if left[y] == 0.0:
            k += 1
    logger.debug(
        "greedy flux: %d sources, %d sinks, %d routed pairs",
        len(sources),
        len(sinks),
        plan.support_size,
    )
    return Flux(graph, values), plan
