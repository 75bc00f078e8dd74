"""Abstract interface for an annealing problem.

An annealing problem supplies everything the error-bound verification needs:
the state graph, the curve of target measures s -> pi_s with its capacities,
the kernel family s -> p_s reversible with respect to pi_s, the algorithm's
initial distribution, and the model's local-stability window.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod

import numpy as np

from discrete_annealing.annealing.schedule import Schedule
from discrete_annealing.graph.measures import Capacity, ProbVector
from discrete_annealing.graph.state_graph import StateGraph
from discrete_annealing.markov.divergences import kl
from discrete_annealing.markov.kernel import RateKernel, capacity_from_kernel
from discrete_annealing.transport.action import DEFAULT_NODES, CurveSpec, gibbs_curve


class AnnealingProblem(ABC):
    """Common interface for the models driven by the annealing algorithm.

    Subclasses implement the measure and kernel families and the stability
    window; the curve, capacity and initial KL have generic defaults.
    """

    schedule: Schedule

    @property
    @abstractmethod
    def graph(self) -> StateGraph:
        """State graph every kernel of the family lives on."""
        ...

    @abstractmethod
    def measure(self, s: float) -> ProbVector:
        """Target measure pi_s along the annealing path."""
        ...

    @abstractmethod
    def kernel(self, s: float) -> RateKernel:
        """Unit-clock rate kernel p_s, reversible with respect to pi_s."""
        ...

    @abstractmethod
    def initial(self) -> ProbVector:
        """Distribution the algorithm starts from."""
        ...

    @abstractmethod
    def stability_window(self, eps: float, horizon: float) -> float:
        """Largest parameter window eta on which the kernels stay locally stable."""
        ...

    # ------------------------------------------------------------------
    # Defaults
    # ------------------------------------------------------------------

    def target(self) -> ProbVector:
        return self.measure(1.0)

    def capacity(self, s: float) -> Capacity:
        return capacity_from_kernel(self.kernel(s), self.measure(s))

    def init_kl(self) -> float:
        """KL(pi_0 || initial)."""
        return kl(self.measure(0.0), self.initial())

    def curve(self, grid: int = DEFAULT_NODES) -> CurveSpec:
        return CurveSpec(self.graph, self.measure, self.capacity, grid=grid)

    def layers(self, eps: float, horizon: float) -> int:
        """N = ceil(1 / eta)."""
        if horizon == 0.0:
            return 1
        return max(1, math.ceil(1.0 / self.stability_window(eps, horizon)))

    def theorem_horizon(self, eps: float) -> float | None:
        """Closed-form horizon from the model's complexity bound, if it has one."""
        return None

    def theorem_layers(self, eps: float) -> int | None:
        return None

    def __repr__(self) -> str:
        return f"{type(self).__name__}(states={self.graph.size}, schedule={self.schedule!r})"


class GibbsAnnealingProblem(AnnealingProblem):
    """Problem whose measures are pi_s proportional to exp(base + beta(s) * statistic).

    The curve uses the analytic Gibbs mass rate.
    """

    def __init__(
        self,
        graph: StateGraph,
        schedule: Schedule,
        statistic: np.ndarray,
        base_log_weight: np.ndarray | None = None,
    ) -> None:
        self._graph = graph
        self.schedule = schedule
        self.statistic = np.asarray(statistic, dtype=float)
        self.base_log_weight = (
            np.zeros_like(self.statistic)
            if base_log_weight is None
            else np.asarray(base_log_weight, dtype=float)
        )

    @property
    def graph(self) -> StateGraph:
        return self._graph

    def measure(self, s: float) -> ProbVector:
        return self.measure_at_beta(self.schedule.beta(s))

    def measure_at_beta(self, beta: float) -> ProbVector:
        return ProbVector.from_log_weights(self.base_log_weight + beta * self.statistic)

    def kernel(self, s: float) -> RateKernel:
        return self.kernel_for(self.measure(s))

    @abstractmethod
    def kernel_for(self, pi: ProbVector) -> RateKernel:
        """The chain's kernel targeting ``pi``."""
        ...

    def capacity_for(self, pi: ProbVector) -> Capacity:
        return capacity_from_kernel(self.kernel_for(pi), pi)

    def curve(self, grid: int = DEFAULT_NODES) -> CurveSpec:
        return gibbs_curve(
            self.graph,
            self.statistic,
            self.schedule.beta,
            self.schedule.beta_prime,
            self.capacity_for,
            base_log_weight=self.base_log_weight,
            grid=grid,
        )
