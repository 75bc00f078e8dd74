"""Rate kernels, reversible pairs and Dirichlet forms.

A rate kernel is a dense generator matrix p with nonnegative off-diagonal
entries supported on a state graph and zero row sums. A reversible pair adds
the stationary distribution and the edge capacity c(x, y) = pi(x) p(x, y).
"""

from __future__ import annotations

import logging
from functools import cached_property

import numpy as np
import scipy.linalg
import scipy.sparse
from numpy.typing import ArrayLike

from discrete_annealing.errors import InvalidKernel, NonStochasticRow, NotReversible
from discrete_annealing.graph.measures import Capacity, ProbVector
from discrete_annealing.graph.state_graph import StateGraph

logger = logging.getLogger(__name__)

ROW_SUM_TOL = 1e-12
STOCHASTIC_TOL = 1e-10
BALANCE_RTOL = 1e-10
BALANCE_FLOOR = 1e-14


class RateKernel:
    """Generator of a continuous-time chain on a state graph."""

    def __init__(self, graph: StateGraph, rates: ArrayLike) -> None:
        p = np.array(rates, dtype=float)
        n = graph.size
        if p.shape != (n, n):
            raise InvalidKernel(f"Rate matrix must be {n}x{n}, got {p.shape}")
        if not np.all(np.isfinite(p)):
            raise InvalidKernel("Rate matrix has non-finite entries")
        off = p.copy()
        np.fill_diagonal(off, 0.0)
        if np.any(off < 0.0):
            x, y = np.argwhere(off < 0.0)[0]
            raise InvalidKernel(f"Negative rate {off[x, y]!r} on ({x}, {y})")
        stray = (off != 0.0) & ~graph.adjacency_mask
        if np.any(stray):
            x, y = np.argwhere(stray)[0]
            raise InvalidKernel(f"Rate on ({x}, {y}) lies outside the state graph")
        sums = p.sum(axis=1)
        scale = max(1.0, float(off.sum(axis=1).max(initial=0.0)))
        if np.any(np.abs(sums) > ROW_SUM_TOL * scale):
            x = int(np.argmax(np.abs(sums)))
            raise InvalidKernel(f"Row {x} sums to {sums[x]!r}, not 0")
        p.flags.writeable = False
        self._graph = graph
        self._rates = p

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def from_off_diagonal(cls, graph: StateGraph, off_diagonal: ArrayLike) -> RateKernel:
        """Fill the diagonal so that every row sums to zero."""
        p = np.array(off_diagonal, dtype=float)
        np.fill_diagonal(p, 0.0)
        np.fill_diagonal(p, -p.sum(axis=1))
        return cls(graph, p)

    @classmethod
    def from_transition_matrix(cls, graph: StateGraph, matrix: ArrayLike) -> RateKernel:
        """Unit-rate generator p = P - I of a stochastic matrix P."""
        P = np.asarray(matrix, dtype=float)
        check_stochastic(P)
        return cls.from_off_diagonal(graph, P)

    @classmethod
    def from_edge_rates(
        cls, graph: StateGraph, forward: ArrayLike, backward: ArrayLike
    ) -> RateKernel:
        """Kernel with p(x, y) = forward[k], p(y, x) = backward[k] on edge k = (x, y)."""
        off = np.zeros((graph.size, graph.size))
        xs, ys = graph.edges[:, 0], graph.edges[:, 1]
        off[xs, ys] = forward
        off[ys, xs] = backward
        return cls.from_off_diagonal(graph, off)

    # ------------------------------------------------------------------
    # Access
    # ------------------------------------------------------------------

    @property
    def graph(self) -> StateGraph:
        return self._graph

    @property
    def rates(self) -> np.ndarray:
        return self._rates

    @property
    def size(self) -> int:
        return self._graph.size

    def rate(self, x: int, y: int) -> float:
        return float(self._rates[x, y])

    @cached_property
    def exit_rates(self) -> np.ndarray:
        return -np.diag(self._rates).copy()

    @property
    def max_exit_rate(self) -> float:
        return float(self.exit_rates.max(initial=0.0))

    def edge_rates(self) -> tuple[np.ndarray, np.ndarray]:
        """(p(x, y), p(y, x)) on every canonical edge (x, y)."""
        xs, ys = self._graph.edges[:, 0], self._graph.edges[:, 1]
        return self._rates[xs, ys], self._rates[ys, xs]

    def to_transition_matrix(self) -> np.ndarray:
        """Stochastic matrix P = I + p of the unit-rate clock."""
        if self.max_exit_rate > 1.0 + STOCHASTIC_TOL:
            raise InvalidKernel(f"Exit rate {self.max_exit_rate!r} exceeds the unit clock")
        return np.eye(self.size) + self._rates

    def sparse(self) -> scipy.sparse.csr_array:
        return scipy.sparse.csr_array(self._rates)

    def generator_apply(self, f: ArrayLike) -> np.ndarray:
        """(L f)(x) = sum_y p(x, y) (f(y) - f(x))."""
        return self._rates @ np.asarray(f, dtype=float)

    def stationary_distribution(self) -> ProbVector:
        """Solve pi p = 0, sum pi = 1 by least squares."""
        a = np.vstack([self._rates.T, np.ones(self.size)])
        b = np.zeros(self.size + 1)
        b[-1] = 1.0
        pi, *_ = scipy.linalg.lstsq(a, b)
        return ProbVector.normalized(np.clip(pi, np.finfo(float).tiny, None))

    def __repr__(self) -> str:
        return f"RateKernel(states={self.size}, max_exit={self.max_exit_rate:.4g})"


def check_stochastic(matrix: np.ndarray, tol: float = STOCHASTIC_TOL) -> None:
    """Raise NonStochasticRow unless every row of ``matrix`` is a distribution."""
    if np.any(matrix < -tol):
        x = int(np.argwhere(matrix < -tol)[0][0])
        raise NonStochasticRow(f"Row {x} has a negative entry")
    sums = matrix.sum(axis=1)
    bad = np.abs(sums - 1.0) > tol
    if np.any(bad):
        x = int(np.flatnonzero(bad)[0])
        raise NonStochasticRow(f"Row {x} sums to {sums[x]!r}, not 1")


# ---------------------------------------------------------------------------
# Reversibility
# ---------------------------------------------------------------------------


def detailed_balance_violation(kernel: RateKernel, pi: ProbVector) -> tuple[float, int]:
    """Worst ratio |a - b| / allowance over edges and its edge id, a = pi(x)p(x,y)."""
    fwd, bwd = kernel.edge_rates()
    xs, ys = kernel.graph.edges[:, 0], kernel.graph.edges[:, 1]
    a = pi.values[xs] * fwd
    b = pi.values[ys] * bwd
    allowance = np.maximum(BALANCE_RTOL * np.maximum(a, b), BALANCE_FLOOR)
    ratios = np.abs(a - b) / allowance
    if ratios.size == 0:
        return 0.0, -1
    k = int(np.argmax(ratios))
    return float(ratios[k]), k


def capacity_from_kernel(kernel: RateKernel, pi: ProbVector) -> Capacity:
    """c(x, y) = pi(x) p(x, y), checked against detailed balance."""
    if pi.size != kernel.size:
        raise InvalidKernel(f"Distribution has {pi.size} states, kernel {kernel.size}")
    worst, k = detailed_balance_violation(kernel, pi)
    if worst > 1.0:
        x, y = (int(v) for v in kernel.graph.edges[k])
        a = pi[x] * kernel.rate(x, y)
        b = pi[y] * kernel.rate(y, x)
        ratio = a / b if b > 0.0 else float("inf")
        raise NotReversible(
            f"Detailed balance fails on ({x}, {y}): pi(x)p(x,y)/pi(y)p(y,x) = {ratio!r}",
            edge=(x, y),
            ratio=ratio,
        )
    fwd, _ = kernel.edge_rates()
    return Capacity(kernel.graph, pi.values[kernel.graph.edges[:, 0]] * fwd)


class ReversiblePair:
    """A kernel with its reversible stationary distribution and capacity."""

    def __init__(self, kernel: RateKernel, stationary: ProbVector) -> None:
        self.kernel = kernel
        self.stationary = stationary
        self.capacity = capacity_from_kernel(kernel, stationary)

    @property
    def graph(self) -> StateGraph:
        return self.kernel.graph

    def dirichlet_form(self, f: ArrayLike, g: ArrayLike) -> float:
        return dirichlet_form(self.capacity, f, g)

    def __repr__(self) -> str:
        return f"ReversiblePair(states={self.graph.size})"


def dirichlet_form(capacity: Capacity, f: ArrayLike, g: ArrayLike) -> float:
    """E(f, g) = 1/2 sum_{x,y} (f(y) - f(x)) (g(y) - g(x)) c(x, y)."""
    fv = np.asarray(f, dtype=float)
    gv = np.asarray(g, dtype=float)
    xs, ys = capacity.graph.edges[:, 0], capacity.graph.edges[:, 1]
    return float(np.sum((fv[ys] - fv[xs]) * (gv[ys] - gv[xs]) * capacity.weights))
