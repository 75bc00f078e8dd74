"""Continuity-equation solves and the metric derivative.

For a capacity c and a mass rate r the admissible potential solves the weighted
graph Laplacian system L_c psi = r, equivalently
sum_y (psi(y) - psi(x)) c(x, y) = -r(x). The optimal flux is
J(x, y) = (psi(y) - psi(x)) c(x, y) and the squared metric derivative is its
kinetic energy sum_{edges} J^2 / c.

Trees (every projected birth-death chain) are solved by subtree sums; other
graphs by a dense Cholesky solve with one state pinned.
"""

from __future__ import annotations

import logging

import networkx as nx
import numpy as np
import scipy.linalg

from discrete_annealing.errors import (
    DisconnectedCapacity,
    InvalidGraph,
    SingularSolve,
    ZeroCapacityEdge,
)
from discrete_annealing.graph.analysis import CapacityAnalyzer
from discrete_annealing.graph.measures import Capacity, Flux, MassRate, ProbVector, divergence
from discrete_annealing.graph.state_graph import StateGraph

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10
_EPS = np.finfo(float).eps


class Potential:
    """State function defined up to an additive constant."""

    __slots__ = ("_values",)

    def __init__(self, values: np.ndarray) -> None:
        arr = np.array(values, dtype=float)
        arr.flags.writeable = False
        self._values = arr

    @property
    def values(self) -> np.ndarray:
        return self._values

    def canonicalized(self, reference: ProbVector) -> Potential:
        """Shift so that E_reference[psi] = 0."""
        return Potential(self._values - reference.expectation(self._values))

    def edge_differences(self, graph: StateGraph) -> np.ndarray:
        """psi(y) - psi(x) on every canonical edge (x, y)."""
        return self._values[graph.edges[:, 1]] - self._values[graph.edges[:, 0]]

    def __repr__(self) -> str:
        return f"Potential(size={self._values.size})"


# ---------------------------------------------------------------------------
# Solvers
# ---------------------------------------------------------------------------


def _check_inputs(graph: StateGraph, capacity: Capacity, rate: MassRate) -> CapacityAnalyzer:
    if capacity.graph is not graph and not np.array_equal(capacity.graph.edges, graph.edges):
        raise InvalidGraph("Capacity is not supported on this graph")
    if rate.size != graph.size:
        raise InvalidGraph(f"Mass rate has {rate.size} entries for {graph.size} states")
    analyzer = CapacityAnalyzer(capacity)
    if not analyzer.is_connected():
        comps = analyzer.components()
        raise DisconnectedCapacity(
            f"Positive-capacity subgraph has {len(comps)} components; "
            f"smallest contains states {comps[-1][:5]}"
        )
    return analyzer


def _solve_tree(analyzer: CapacityAnalyzer, rate: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Subtree-sum flow on a spanning tree, potential by integration from the root."""
    graph = analyzer.state_graph
    tree = analyzer.positive_subgraph
    w = analyzer.capacity.weights
    size = graph.size
    psi = np.zeros(size)
    flux = np.zeros(graph.num_edges)
    if size == 1:
        return psi, flux

    root = 0
    order = [root] + [v for _, v in nx.bfs_edges(tree, root)]
    parent = dict(nx.bfs_predecessors(tree, root))
    subtree = rate.copy()
    for v in reversed(order[1:]):
        subtree[parent[v]] += subtree[v]

    # div J over subtree(v) equals J(v, parent) and must cancel the subtree rate
    for v in order[1:]:
        p = parent[v]
        k = tree.edges[v, p]["eid"]
        j_v_to_p = -subtree[v]
        flux[k] = j_v_to_p if v < p else -j_v_to_p
        psi[v] = psi[p] + subtree[v] / w[k]
    return psi, flux


def _solve_dense(analyzer: CapacityAnalyzer, rate: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pinned Cholesky solve of L psi = rate."""
    graph = analyzer.state_graph
    lap = analyzer.laplacian()
    pin = int(np.argmax(np.diag(lap)))
    keep = np.flatnonzero(np.arange(graph.size) != pin)
    psi = np.zeros(graph.size)
    try:
        psi[keep] = scipy.linalg.solve(
            lap[np.ix_(keep, keep)], rate[keep], assume_a="pos", check_finite=False
        )
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise SingularSolve(f"Laplacian solve failed: {exc}") from exc
    diffs = psi[graph.edges[:, 1]] - psi[graph.edges[:, 0]]
    return psi, diffs * analyzer.capacity.weights


def _solve(
    graph: StateGraph, capacity: Capacity, rate: MassRate
) -> tuple[np.ndarray, np.ndarray]:
    analyzer = _check_inputs(graph, capacity, rate)
    r = rate.values
    if not np.any(r):
        return np.zeros(graph.size), np.zeros(graph.num_edges)

    if analyzer.is_tree():
        psi, flux = _solve_tree(analyzer, r)
        method = "tree"
    else:
        psi, flux = _solve_dense(analyzer, r)
        method = "dense"

    w = capacity.weights
    residual = np.linalg.norm(r + divergence(Flux(graph, flux)).values)
    lap_norm = 2.0 * float(analyzer.degrees().max())
    bound = max(RESIDUAL_TOL * rate.norm(), 64 * _EPS * lap_norm * float(np.linalg.norm(psi)))
    logger.debug("continuity solve (%s): residual=%.3e bound=%.3e", method, residual, bound)
    if not np.isfinite(residual) or residual > bound:
        raise SingularSolve(f"Continuity residual {residual:.3e} exceeds {bound:.3e}")
    if np.any(flux[w == 0.0]):
        raise ZeroCapacityEdge("Solver placed flux on a zero-capacity edge")
    return psi, flux


def solve_continuity_potential(
    graph: StateGraph,
    capacity: Capacity,
    rate: MassRate,
    reference: ProbVector,
) -> Potential:
    """Admissible potential for ``rate``, zero mean under ``reference``."""
    psi, _ = _solve(graph, capacity, rate)
    return Potential(psi).canonicalized(reference)


def metric_derivative_sq(
    graph: StateGraph,
    capacity: Capacity,
    rate: MassRate,
    reference: ProbVector,
) -> tuple[float, Flux]:
    """Squared metric derivative and the optimal flux.

    The reference only fixes the potential's gauge; the value and flux do not
    depend on it.
    """
    _, flux = _solve(graph, capacity, rate)
    optimal = Flux(graph, flux)
    return flux_cost(capacity, optimal), optimal


def flux_cost(capacity: Capacity, flux: Flux) -> float:
    """Kinetic energy 1/2 sum_{x,y} J(x,y)^2 / c(x,y), one term per edge."""
    w = capacity.weights
    j = flux.values
    if j.shape != w.shape:
        raise InvalidGraph("Flux and capacity live on different edge sets")
    dead = w == 0.0
    if np.any(j[dead] != 0.0):
        k = int(np.flatnonzero(dead & (j != 0.0))[0])
        x, y = capacity.graph.edges[k]
        raise ZeroCapacityEdge(f"Nonzero flux {j[k]!r} on zero-capacity edge ({x}, {y})")
    live = ~dead
    return float(np.sum(j[live] ** 2 / w[live]))


def wc2_distance(
    graph: StateGraph,
    capacity: Capacity,
    mu: ProbVector,
    nu: ProbVector,
) -> float:
    """W_{c,2}(mu, nu): the fixed-capacity transport distance."""
    value, _ = metric_derivative_sq(graph, capacity, MassRate.between(mu, nu), mu)
    return float(np.sqrt(value))
