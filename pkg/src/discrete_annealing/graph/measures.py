"""Distributions, mass rates, capacities and fluxes over a state graph.

All containers copy their input into read-only numpy arrays, so instances can be
shared freely once built. Edge-indexed arrays follow the edge ids of
:class:`~discrete_annealing.graph.state_graph.StateGraph`.
"""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import logsumexp

from discrete_annealing.errors import InvalidDistribution, InvalidGraph, InvalidMassRate
from discrete_annealing.graph.state_graph import StateGraph

SUM_TOL = 1e-12


def _frozen(values: ArrayLike) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.flags.writeable = False
    return arr


# ---------------------------------------------------------------------------
# Vertex functions
# ---------------------------------------------------------------------------


class ProbVector:
    """Strictly positive probability distribution indexed by state."""

    __slots__ = ("_values",)

    def __init__(self, values: ArrayLike) -> None:
        arr = _frozen(values)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidDistribution(f"Expected a non-empty vector, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidDistribution("Distribution has non-finite entries")
        if np.any(arr <= 0.0):
            worst = int(np.argmin(arr))
            raise InvalidDistribution(f"Entry {worst} is not positive: {arr[worst]!r}")
        total = float(arr.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise InvalidDistribution(f"Entries sum to {total!r}, not 1")
        self._values = arr

    @classmethod
    def normalized(cls, weights: ArrayLike) -> ProbVector:
        """Explicit renormalization of positive weights."""
        w = np.asarray(weights, dtype=float)
        return cls(w / w.sum())

    @classmethod
    def from_log_weights(cls, log_weights: ArrayLike) -> ProbVector:
        """Normalize ``exp(log_weights)`` with log-sum-exp."""
        lw = np.asarray(log_weights, dtype=float)
        p = np.exp(lw - logsumexp(lw))
        # one renormalization absorbs the rounding of exp
        return cls(p / p.sum())

    @classmethod
    def uniform(cls, size: int) -> ProbVector:
        return cls(np.full(size, 1.0 / size))

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def size(self) -> int:
        return int(self._values.size)

    def expectation(self, f: ArrayLike) -> float:
        """E_pi[f]."""
        return float(np.dot(self._values, np.asarray(f, dtype=float)))

    def __len__(self) -> int:
        return self.size

    def __getitem__(self, index: int) -> float:
        return float(self._values[index])

    def __repr__(self) -> str:
        return f"ProbVector(size={self.size})"


class MassRate:
    """Tangent vector to the simplex: entries sum to zero."""

    __slots__ = ("_values",)

    def __init__(self, values: ArrayLike) -> None:
        arr = _frozen(values)
        if arr.ndim != 1:
            raise InvalidMassRate(f"Expected a vector, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidMassRate("Mass rate has non-finite entries")
        total = float(arr.sum())
        scale = max(1.0, float(np.abs(arr).sum()))
        if abs(total) > SUM_TOL * scale:
            raise InvalidMassRate(f"Mass rate sums to {total!r}, not 0")
        self._values = arr

    @classmethod
    def centered(cls, values: ArrayLike) -> MassRate:
        """Subtract the mean so the entries sum to zero."""
        arr = np.asarray(values, dtype=float)
        return cls(arr - arr.mean())

    @classmethod
    def zeros(cls, size: int) -> MassRate:
        return cls(np.zeros(size))

    @classmethod
    def between(cls, mu: ProbVector, nu: ProbVector) -> MassRate:
        """The constant rate moving ``mu`` to ``nu`` in unit time."""
        return cls(nu.values - mu.values)

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def size(self) -> int:
        return int(self._values.size)

    def norm(self) -> float:
        return float(np.linalg.norm(self._values))

    def __repr__(self) -> str:
        return f"MassRate(size={self.size}, norm={self.norm():.3g})"


# ---------------------------------------------------------------------------
# Edge functions
# ---------------------------------------------------------------------------


class Capacity:
    """Symmetric nonnegative edge weight, one value per undirected edge."""

    __slots__ = ("_graph", "_weights")

    def __init__(self, graph: StateGraph, weights: ArrayLike) -> None:
        arr = _frozen(weights)
        if arr.shape != (graph.num_edges,):
            raise InvalidGraph(
                f"Capacity needs {graph.num_edges} edge weights, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
            raise InvalidGraph("Capacity weights must be finite and nonnegative")
        self._graph = graph
        self._weights = arr

    @classmethod
    def from_matrix(cls, graph: StateGraph, matrix: ArrayLike) -> Capacity:
        """Read the upper triangle of a symmetric matrix; off-graph mass is rejected."""
        m = np.asarray(matrix, dtype=float)
        off = np.triu(m, k=1)
        off[graph.edges[:, 0], graph.edges[:, 1]] = 0.0
        if np.any(off != 0.0):
            x, y = np.argwhere(off != 0.0)[0]
            raise InvalidGraph(f"Capacity on ({x}, {y}) lies outside the edge set")
        return cls(graph, m[graph.edges[:, 0], graph.edges[:, 1]])

    @classmethod
    def from_mapping(cls, graph: StateGraph, weights: Mapping[tuple[int, int], float]) -> Capacity:
        arr = np.zeros(graph.num_edges)
        for (x, y), w in weights.items():
            arr[graph.edge_id(x, y)] = w
        return cls(graph, arr)

    @property
    def graph(self) -> StateGraph:
        return self._graph

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def total(self) -> float:
        return float(self._weights.sum())

    def value(self, x: int, y: int) -> float:
        """c(x, y) = c(y, x); zero for non-edges."""
        if not self._graph.has_edge(x, y):
            return 0.0
        return float(self._weights[self._graph.edge_id(x, y)])

    def to_matrix(self) -> np.ndarray:
        """Dense symmetric matrix with zero diagonal."""
        n = self._graph.size
        m = np.zeros((n, n))
        xs, ys = self._graph.edges[:, 0], self._graph.edges[:, 1]
        m[xs, ys] = self._weights
        m[ys, xs] = self._weights
        return m

    def scaled(self, factor: float) -> Capacity:
        return Capacity(self._graph, self._weights * factor)

    def __repr__(self) -> str:
        return f"Capacity(edges={self._weights.size}, total={self.total:.4g})"


class Flux:
    """Antisymmetric edge function stored on canonical orientations.

    ``values[k]`` is J(x, y) for the k-th edge (x < y); J(y, x) is its negative,
    so antisymmetry holds by construction.
    """

    __slots__ = ("_graph", "_values")

    def __init__(self, graph: StateGraph, values: ArrayLike) -> None:
        arr = _frozen(values)
        if arr.shape != (graph.num_edges,):
            raise InvalidGraph(f"Flux needs {graph.num_edges} edge values, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidGraph("Flux has non-finite values")
        self._graph = graph
        self._values = arr

    @classmethod
    def zeros(cls, graph: StateGraph) -> Flux:
        return cls(graph, np.zeros(graph.num_edges))

    @classmethod
    def from_matrix(cls, graph: StateGraph, matrix: ArrayLike) -> Flux:
        """Build from a dense antisymmetric matrix J[x, y]."""
        m = np.asarray(matrix, dtype=float)
        if not np.array_equal(m, -m.T):
            raise InvalidGraph("Flux matrix is not antisymmetric")
        off = np.triu(m, k=1)
        off[graph.edges[:, 0], graph.edges[:, 1]] = 0.0
        if np.any(off != 0.0):
            raise InvalidGraph("Flux matrix has mass outside the edge set")
        return cls(graph, m[graph.edges[:, 0], graph.edges[:, 1]])

    @property
    def graph(self) -> StateGraph:
        return self._graph

    @property
    def values(self) -> np.ndarray:
        return self._values

    def value(self, x: int, y: int) -> float:
        """J(x, y); zero for non-edges."""
        if not self._graph.has_edge(x, y):
            return 0.0
        v = float(self._values[self._graph.edge_id(x, y)])
        return v if x < y else -v

    def to_matrix(self) -> np.ndarray:
        n = self._graph.size
        m = np.zeros((n, n))
        xs, ys = self._graph.edges[:, 0], self._graph.edges[:, 1]
        m[xs, ys] = self._values
        m[ys, xs] = -self._values
        return m

    def divergence(self) -> MassRate:
        return divergence(self)

    def __add__(self, other: Flux) -> Flux:
        if other.graph is not self._graph:
            raise InvalidGraph("Cannot add fluxes on different graphs")
        return Flux(self._graph, self._values + other.values)

    def __mul__(self, factor: float) -> Flux:
        return Flux(self._graph, self._values * factor)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"Flux(edges={self._values.size}, max={np.abs(self._values).max(initial=0.0):.3g})"


def divergence(flux: Flux) -> MassRate:
    """div J(x) = sum_y J(x, y)."""
    graph = flux.graph
    out = np.zeros(graph.size)
    np.add.at(out, graph.edges[:, 0], flux.values)
    np.add.at(out, graph.edges[:, 1], -flux.values)
    return MassRate(out)
