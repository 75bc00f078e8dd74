"""Projected and folded mean-field Ising chains.

Magnetization projection sends a configuration to m in {-n, -n+2, ..., n};
folding further identifies m with -m. Both push the Glauber dynamics to a
birth-death chain with closed-form measure, capacity and lumped kernel, so the
projected chains scale to thousands of sites.
"""

from __future__ import annotations

import logging
from functools import cached_property

import numpy as np
from scipy.special import expit, gammaln, logsumexp

from discrete_annealing.graph.measures import Capacity, ProbVector
from discrete_annealing.graph.state_graph import StateGraph
from discrete_annealing.markov.kernel import RateKernel

logger = logging.getLogger(__name__)

MAX_PROJECTED_SITES = 10_000


def log_binomial(n: int, k: np.ndarray) -> np.ndarray:
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def magnetization_grid(n: int, folded: bool = False) -> np.ndarray:
    """Magnetizations in ascending order; nonnegative ones only when folded."""
    m = np.arange(-n, n + 1, 2, dtype=np.int64)
    return m[m >= 0] if folded else m


def fold_multiplicity(m: np.ndarray) -> np.ndarray:
    """r(m): 1 at m = 0, 2 elsewhere."""
    return np.where(np.asarray(m) == 0, 1, 2)


def glauber_up_rate(n: int, beta: float, m: np.ndarray) -> np.ndarray:
    """p_bar(m, m + 2) of the lumped Glauber chain."""
    m = np.asarray(m, dtype=float)
    return (n - m) / (2.0 * n) * expit(beta * ((m + 2) ** 2 - m**2) / (2.0 * n))


def glauber_down_rate(n: int, beta: float, m: np.ndarray) -> np.ndarray:
    """p_bar(m, m - 2) of the lumped Glauber chain."""
    m = np.asarray(m, dtype=float)
    return (n + m) / (2.0 * n) * expit(beta * ((m - 2) ** 2 - m**2) / (2.0 * n))


class ProjectedIsingChain:
    """Birth-death chain of the magnetization (or its absolute value).

    States are the magnetizations in ascending order; edge k joins states k
    and k + 1.
    """

    def __init__(self, n: int, beta: float, folded: bool = False) -> None:
        if not 1 <= n <= MAX_PROJECTED_SITES:
            raise ValueError(f"Projected Ising chain needs 1 <= n <= {MAX_PROJECTED_SITES}")
        if beta < 0.0:
            raise ValueError(f"beta must be nonnegative, got {beta}")
        self.n = n
        self.beta = float(beta)
        self.folded = folded
        self.m = magnetization_grid(n, folded)
        self.graph = StateGraph.path(self.m.size, self.m.tolist())

    # ------------------------------------------------------------------
    # Measure
    # ------------------------------------------------------------------

    def base_log_weight(self) -> np.ndarray:
        """log of the fiber size: log C(n, (n+m)/2), plus log r(m) when folded."""
        base = log_binomial(self.n, (self.n + self.m) // 2)
        if self.folded:
            base = base + np.log(fold_multiplicity(self.m))
        return base

    def statistic(self) -> np.ndarray:
        """m^2 / (2n), the energy multiplied by beta in the exponent."""
        return self.m.astype(float) ** 2 / (2.0 * self.n)

    @cached_property
    def log_measure(self) -> np.ndarray:
        logits = self.base_log_weight() + self.beta * self.statistic()
        return logits - logsumexp(logits)

    @cached_property
    def measure(self) -> ProbVector:
        return ProbVector.from_log_weights(self.log_measure)

    # ------------------------------------------------------------------
    # Dynamics
    # ------------------------------------------------------------------

    @cached_property
    def capacity(self) -> Capacity:
        """Closed-form projected Glauber capacity; c = 2 c_bar on folded edges."""
        lo, hi = self.m[:-1], self.m[1:]
        lp = self._unfolded_log_measure
        n = self.n
        la = lp[(lo + n) // 2]
        lb = lp[(hi + n) // 2]
        ratio = np.log((n - lo) / (n + lo + 2.0))
        log_c = np.log((n - lo) / (2.0 * n)) + la + lb - np.logaddexp(ratio + la, lb)
        c = np.exp(log_c)
        if self.folded:
            c = 2.0 * c
        return Capacity(self.graph, c)

    @cached_property
    def _unfolded_log_measure(self) -> np.ndarray:
        if not self.folded:
            return self.log_measure
        return ProjectedIsingChain(self.n, self.beta).log_measure

    @cached_property
    def kernel(self) -> RateKernel:
        """Lumped Glauber kernel; folding merges m and -m and drops self-loops."""
        lo, hi = self.m[:-1], self.m[1:]
        up = glauber_up_rate(self.n, self.beta, lo)
        down = glauber_down_rate(self.n, self.beta, hi)
        if self.folded:
            # 0 -> 2 collects the moves to 2 and to -2
            up = np.where(lo == 0, 2.0 * up, up)
        return RateKernel.from_edge_rates(self.graph, up, down)

    def canonical_paths(self) -> dict[tuple[int, int], list[int]]:
        """Monotone segment between every pair of states."""
        size = self.m.size
        return {(x, y): list(range(x, y + 1)) for x in range(size) for y in range(x + 1, size)}

    # ------------------------------------------------------------------
    # Bounds
    # ------------------------------------------------------------------

    def capacity_lower_bound(self) -> np.ndarray:
        """(1 / 2n) min(pi(m), pi(m + 2)) on every edge."""
        pi = self.measure.values
        return np.minimum(pi[:-1], pi[1:]) / (2.0 * self.n)

    def capacity_bound_slack(self) -> float:
        """min over edges of c / lower bound; at least 1 when the bound holds."""
        if self.graph.num_edges == 0:
            return float("inf")
        return float(np.min(self.capacity.weights / self.capacity_lower_bound()))

    def index_of(self, m: int) -> int:
        return self.graph.index_of(int(m))

    def __repr__(self) -> str:
        kind = "folded" if self.folded else "projected"
        return f"ProjectedIsingChain(n={self.n}, beta={self.beta}, {kind})"


def projected_chain(n: int, beta: float, folded: bool = False) -> ProjectedIsingChain:
    return ProjectedIsingChain(n, beta, folded)
