"""Projections of a state graph onto a quotient space.

A :class:`Projection` maps every source state to a projected label. Fibers are
materialized eagerly; the projected graph joins two labels when some source
edge crosses between their fibers. Measures, mass rates, capacities and
kernels are pushed forward by fiber sums.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Hashable, Sequence
from functools import cached_property

import numpy as np

from discrete_annealing.errors import InvalidGraph
from discrete_annealing.graph.measures import Capacity, MassRate, ProbVector
from discrete_annealing.graph.state_graph import StateGraph
from discrete_annealing.markov.kernel import RateKernel
from discrete_annealing.transport.action import CurveSpec

logger = logging.getLogger(__name__)


class Projection:
    """Surjection from the states of ``source`` onto sorted projected labels.

    ``labels[i]`` is the projected label of source state ``i``. Projected
    states are the distinct labels in sorted order (or ``order`` when given).
    """

    def __init__(
        self,
        source: StateGraph,
        labels: Sequence[Hashable],
        order: Sequence[Hashable] | None = None,
    ) -> None:
        if len(labels) != source.size:
            raise InvalidGraph(f"Projection needs {source.size} labels, got {len(labels)}")
        targets = list(order) if order is not None else sorted(set(labels))
        index = {label: a for a, label in enumerate(targets)}
        try:
            self._index = np.fromiter((index[label] for label in labels), np.int64, source.size)
        except KeyError as exc:
            raise InvalidGraph(f"Label {exc.args[0]!r} missing from the projected order") from exc
        if np.unique(self._index).size != len(targets):
            raise InvalidGraph("Projection is not surjective onto its projected states")
        self._index.flags.writeable = False
        self._source = source

        # Source edges that cross fibers, and the projected edge each feeds.
        ends = self._index[source.edges]
        crossing = ends[:, 0] != ends[:, 1]
        self._crossing = crossing
        pairs = {(min(a, b), max(a, b)) for a, b in ends[crossing].tolist()}
        self._target = StateGraph(targets, sorted(pairs))
        self._edge_map = np.fromiter(
            (self._target.edge_id(int(a), int(b)) for a, b in ends[crossing]),
            np.int64,
            int(crossing.sum()),
        )

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def from_function(
        cls, source: StateGraph, fn: Callable[[Hashable], Hashable]
    ) -> Projection:
        """Project by applying ``fn`` to each source state label."""
        return cls(source, [fn(label) for label in source.states])

    @classmethod
    def identity(cls, source: StateGraph) -> Projection:
        return cls(source, list(source.states), order=list(source.states))

    # ------------------------------------------------------------------
    # Structure
    # ------------------------------------------------------------------

    @property
    def source(self) -> StateGraph:
        return self._source

    @property
    def target(self) -> StateGraph:
        """Projected graph."""
        return self._target

    @property
    def index(self) -> np.ndarray:
        """Projected index of every source state."""
        return self._index

    @cached_property
    def fibers(self) -> list[np.ndarray]:
        """Source states of each projected state, in projected order."""
        order = np.argsort(self._index, kind="stable")
        cuts = np.cumsum(np.bincount(self._index, minlength=self._target.size))[:-1]
        return np.split(order, cuts)

    def fiber_of(self, label: Hashable) -> np.ndarray:
        return self.fibers[self._target.index_of(label)]

    def then(self, other: Projection) -> Projection:
        """Composition ``other`` after ``self``."""
        if other.source.states != self._target.states:
            raise InvalidGraph("Second projection does not start from this projection's target")
        return Projection(
            self._source,
            [other.target.label_of(int(other.index[a])) for a in self._index],
            order=list(other.target.states),
        )

    # ------------------------------------------------------------------
    # Pushforwards
    # ------------------------------------------------------------------

    def _push(self, values: np.ndarray) -> np.ndarray:
        return np.bincount(self._index, weights=values, minlength=self._target.size)

    def project_measure(self, mu: ProbVector) -> ProbVector:
        """(Pi_# mu)(a) = sum over the fiber of a of mu(x)."""
        return ProbVector.normalized(self._push(mu.values))

    def project_rate(self, rate: MassRate) -> MassRate:
        return MassRate.centered(self._push(rate.values))

    def project_capacity(self, capacity: Capacity) -> Capacity:
        """c_bar(a, b) = sum of c(x, y) over x in fiber a, y in fiber b."""
        weights = np.zeros(self._target.num_edges)
        np.add.at(weights, self._edge_map, capacity.weights[self._crossing])
        return Capacity(self._target, weights)

    def kernel_rows(self, kernel: RateKernel) -> np.ndarray:
        """Pi_# p(x, .) for every source state x, as a (source, projected) array."""
        out = np.zeros((self._source.size, self._target.size))
        for a, fiber in enumerate(self.fibers):
            out[:, a] = kernel.rates[:, fiber].sum(axis=1)
        return out

    def lump_kernel(self, kernel: RateKernel, pi: ProbVector) -> RateKernel:
        """Projected kernel p_bar(a, b) = sum_{x in a} pi(x) Pi_# p(x, .)(b) / pi_bar(a)."""
        rows = self.kernel_rows(kernel) * pi.values[:, None]
        lumped = np.zeros((self._target.size, self._target.size))
        np.add.at(lumped, self._index, rows)
        lumped /= self._push(pi.values)[:, None]
        return RateKernel.from_off_diagonal(self._target, lumped)

    def push_curve(self, curve: CurveSpec) -> CurveSpec:
        """Projected curve s -> (Pi_# pi_s, Pi_# c_s) with the projected mass rate."""
        rate = None
        if curve.has_analytic_rate:
            rate = lambda s: self.project_rate(curve.mass_rate(s))  # noqa: E731
        return CurveSpec(
            self._target,
            lambda s: self.project_measure(curve.measure(s)),
            lambda s: self.project_capacity(curve.capacity(s)),
            rate=rate,
            grid=curve.grid,
            horizon=curve.horizon,
            consistency_tol=curve.consistency_tol,
            fd_step=curve.fd_step / curve.horizon,
        )

    def __repr__(self) -> str:
        return f"Projection({self._source.size} -> {self._target.size} states)"


def project_measure(proj: Projection, mu: ProbVector) -> ProbVector:
    return proj.project_measure(mu)


def project_capacity(proj: Projection, capacity: Capacity) -> Capacity:
    return proj.project_capacity(capacity)
