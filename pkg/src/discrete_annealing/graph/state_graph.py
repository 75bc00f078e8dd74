"""State graph using a NetworkX Graph.

Models a finite state space as densely indexed nodes with an undirected edge
set. Each edge is stored once with its canonical orientation (lower index
first); its position in :attr:`StateGraph.edges` is the edge id used by every
edge-indexed array in the package.
"""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Sequence
from functools import cached_property

import networkx as nx
import numpy as np

from discrete_annealing.errors import InvalidGraph


class StateGraph:
    """Finite state space with an undirected, loop-free edge set.

    Nodes of the underlying NetworkX graph are the dense indices
    ``0 .. size-1``; the opaque state label is stored in the ``label`` node
    attribute and the edge id in the ``eid`` edge attribute. The graph is
    frozen after construction.
    """

    def __init__(self, states: Sequence[Hashable], edges: Iterable[tuple[int, int]] = ()) -> None:
        self._states: tuple[Hashable, ...] = tuple(states)
        self._index: dict[Hashable, int] = {}
        for i, label in enumerate(self._states):
            if label in self._index:
                raise InvalidGraph(f"Duplicate state label: {label!r}")
            self._index[label] = i

        size = len(self._states)
        canonical: set[tuple[int, int]] = set()
        for x, y in edges:
            x, y = int(x), int(y)
            if x == y:
                raise InvalidGraph(f"Self-loop at state {x}")
            if not (0 <= x < size and 0 <= y < size):
                raise InvalidGraph(f"Edge ({x}, {y}) references an unknown state")
            canonical.add((x, y) if x < y else (y, x))

        ordered = sorted(canonical)
        self._edges = np.array(ordered, dtype=np.int64).reshape(-1, 2)
        self._edges.flags.writeable = False
        self._edge_ids = {pair: k for k, pair in enumerate(ordered)}

        g = nx.Graph()
        g.add_nodes_from((i, {"label": label}) for i, label in enumerate(self._states))
        g.add_edges_from((x, y, {"eid": k}) for k, (x, y) in enumerate(ordered))
        self._graph = nx.freeze(g)

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def from_labels(
        cls,
        states: Sequence[Hashable],
        label_edges: Iterable[tuple[Hashable, Hashable]],
    ) -> StateGraph:
        """Build a graph from edges given as state labels."""
        index = {label: i for i, label in enumerate(states)}
        try:
            pairs = [(index[a], index[b]) for a, b in label_edges]
        except KeyError as exc:
            raise InvalidGraph(f"Unknown state label {exc.args[0]!r}") from exc
        return cls(states, pairs)

    @classmethod
    def from_support(cls, states: Sequence[Hashable], matrix: np.ndarray) -> StateGraph:
        """Build the underlying graph of a matrix: {x,y} is an edge iff either entry is nonzero."""
        m = np.asarray(matrix)
        support = (m != 0) | (m.T != 0)
        np.fill_diagonal(support, False)
        xs, ys = np.nonzero(np.triu(support, k=1))
        return cls(states, zip(xs.tolist(), ys.tolist()))

    @classmethod
    def path(cls, size: int, states: Sequence[Hashable] | None = None) -> StateGraph:
        """Path graph 0 - 1 - ... - (size-1)."""
        labels = list(states) if states is not None else list(range(size))
        return cls(labels, ((i, i + 1) for i in range(size - 1)))

    @classmethod
    def cycle(cls, size: int) -> StateGraph:
        """Cycle graph on ``size`` states."""
        return cls(list(range(size)), ((i, (i + 1) % size) for i in range(size)))

    @classmethod
    def complete(cls, size: int) -> StateGraph:
        """Complete graph on ``size`` states."""
        return cls(
            list(range(size)),
            ((i, j) for i in range(size) for j in range(i + 1, size)),
        )

    # ------------------------------------------------------------------
    # Structure
    # ------------------------------------------------------------------

    @property
    def graph(self) -> nx.Graph:
        """Return the underlying (frozen) NetworkX Graph."""
        return self._graph

    @property
    def states(self) -> tuple[Hashable, ...]:
        return self._states

    @property
    def size(self) -> int:
        """Number of states."""
        return len(self._states)

    @property
    def num_edges(self) -> int:
        """Number of undirected edges."""
        return int(self._edges.shape[0])

    @property
    def edges(self) -> np.ndarray:
        """Canonical edge array of shape (E, 2), lower index first."""
        return self._edges

    @cached_property
    def adjacency_mask(self) -> np.ndarray:
        """Symmetric boolean adjacency matrix (diagonal False)."""
        mask = np.zeros((self.size, self.size), dtype=bool)
        mask[self._edges[:, 0], self._edges[:, 1]] = True
        mask[self._edges[:, 1], self._edges[:, 0]] = True
        mask.flags.writeable = False
        return mask

    # ------------------------------------------------------------------
    # Query
    # ------------------------------------------------------------------

    def index_of(self, label: Hashable) -> int:
        """Dense index of a state label."""
        try:
            return self._index[label]
        except KeyError as exc:
            raise InvalidGraph(f"Unknown state label {label!r}") from exc

    def label_of(self, index: int) -> Hashable:
        return self._states[index]

    def neighbors(self, index: int) -> list[int]:
        """Sorted neighbor indices of a state."""
        return sorted(self._graph.neighbors(index))

    def has_edge(self, x: int, y: int) -> bool:
        return (min(x, y), max(x, y)) in self._edge_ids

    def edge_id(self, x: int, y: int) -> int:
        """Edge id of {x, y}; raises InvalidGraph if absent."""
        try:
            return self._edge_ids[(min(x, y), max(x, y))]
        except KeyError as exc:
            raise InvalidGraph(f"No edge between states {x} and {y}") from exc

    def is_connected(self) -> bool:
        """Connectivity of the full edge set (vacuously true for <= 1 state)."""
        if self.size <= 1:
            return True
        return nx.is_connected(self._graph)

    def __repr__(self) -> str:
        return f"StateGraph(states={self.size}, edges={self.num_edges})"
