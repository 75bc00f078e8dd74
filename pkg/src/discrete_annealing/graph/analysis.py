"""Structural analysis of a capacity on a state graph.

Connectivity of the positive-capacity subgraph, the weighted Laplacian used by
every transport solve, tree detection for the fast continuity path, and
shortest canonical routings.
"""

from __future__ import annotations

from functools import cached_property

import networkx as nx
import numpy as np

from discrete_annealing.errors import InvalidGraph
from discrete_annealing.graph.measures import Capacity
from discrete_annealing.graph.state_graph import StateGraph


class CapacityAnalyzer:
    """Analyzes the subgraph of strictly positive capacities.

    All graph queries operate on a NetworkX Graph holding only the edges with
    c > 0, weighted by ``capacity``.
    """

    def __init__(self, capacity: Capacity) -> None:
        self.capacity = capacity

    @property
    def state_graph(self) -> StateGraph:
        return self.capacity.graph

    @cached_property
    def positive_subgraph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.state_graph.size))
        w = self.capacity.weights
        for k in np.flatnonzero(w > 0.0):
            x, y = self.state_graph.edges[k]
            g.add_edge(int(x), int(y), capacity=float(w[k]), eid=int(k))
        return g

    # ------------------------------------------------------------------
    # Connectivity
    # ------------------------------------------------------------------

    def is_connected(self) -> bool:
        """True iff the positive-capacity subgraph is connected."""
        if self.state_graph.size <= 1:
            return True
        return nx.is_connected(self.positive_subgraph)

    def components(self) -> list[list[int]]:
        """Connected components as sorted index lists, largest first."""
        comps = [sorted(c) for c in nx.connected_components(self.positive_subgraph)]
        return sorted(comps, key=lambda c: (-len(c), c[0]))

    def is_tree(self) -> bool:
        """True iff the positive-capacity subgraph is a spanning tree."""
        if self.state_graph.size <= 1:
            return True
        return nx.is_tree(self.positive_subgraph)

    # ------------------------------------------------------------------
    # Linear algebra
    # ------------------------------------------------------------------

    def laplacian(self) -> np.ndarray:
        """Weighted graph Laplacian L = D - W (positive semidefinite)."""
        w = self.capacity.to_matrix()
        return np.diag(w.sum(axis=1)) - w

    def degrees(self) -> np.ndarray:
        """Weighted degree sum_y c(x, y) per state."""
        return self.capacity.to_matrix().sum(axis=1)

    # ------------------------------------------------------------------
    # Routing
    # ------------------------------------------------------------------

    def shortest_paths(self) -> dict[tuple[int, int], list[int]]:
        """One hop-shortest path per unordered pair x < y of the positive subgraph.

        Ties are broken by NetworkX's BFS order over sorted neighbors, so the
        routing is deterministic.
        """
        if not self.is_connected():
            raise InvalidGraph("Cannot route on a disconnected capacity")
        g = nx.Graph()
        g.add_nodes_from(range(self.state_graph.size))
        g.add_edges_from(sorted(self.positive_subgraph.edges()))
        routes: dict[tuple[int, int], list[int]] = {}
        for x in range(self.state_graph.size):
            paths = nx.single_source_shortest_path(g, x)
            for y, path in paths.items():
                if y > x:
                    routes[(x, y)] = list(path)
        return routes


def is_connected(graph: StateGraph, capacity: Capacity) -> bool:
    """True iff the subgraph of strictly positive capacities is connected."""
    if capacity.graph is not graph and not np.array_equal(capacity.graph.edges, graph.edges):
        raise InvalidGraph("Capacity is not supported on this graph")
    return CapacityAnalyzer(capacity).is_connected()
