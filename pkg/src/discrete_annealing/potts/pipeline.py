"""Annealing the mean-field Potts model down from a low-temperature start.

The schedule runs beta(s) = beta0 - (beta0 - beta) s from the monochrome-
dominated measure at beta0 = n log q + log(6 / eps) to the target. The action
is computed exactly on the folded chain and compared with the cost of the
greedy matching flux routed through the diagonal maximizer.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy.integrate import simpson

from discrete_annealing.annealing.bounds import verify_error_bound
from discrete_annealing.annealing.exact import run_exact
from discrete_annealing.annealing.problem import GibbsAnnealingProblem
from discrete_annealing.annealing.schedule import Schedule
from discrete_annealing.errors import BoundViolation, PreconditionBeta
from discrete_annealing.graph.measures import ProbVector
from discrete_annealing.markov.divergences import kl
from discrete_annealing.markov.kernel import RateKernel
from discrete_annealing.models import (
    AnnealConfig,
    HorizonRule,
    PottsActionReport,
    PottsComplexityReport,
    StateSpace,
)
from discrete_annealing.potts.flux import greedy_flux
from discrete_annealing.potts.initializer import gibbs_weights, init_beta, initial_mixture
from discrete_annealing.potts.model import (
    MAX_KERNEL_STATES,
    block_glauber_kernel,
    block_graph,
    full_size,
)
from discrete_annealing.potts.paths import check_low_temperature, transport_paths
from discrete_annealing.potts.projected import ProjectedPottsChain, composition_moves
from discrete_annealing.transport.action import DEFAULT_NODES, action
from discrete_annealing.transport.potential import flux_cost

logger = logging.getLogger(__name__)

COMPARISON_RTOL = 1e-9


class PottsAnnealing(GibbsAnnealingProblem):
    """Block Glauber annealing of the mean-field Potts model on one of its state spaces."""

    def __init__(
        self,
        n: int,
        q: int,
        schedule: Schedule,
        eps: float | None = None,
        space: StateSpace = StateSpace.FOLDED,
        exponent_constant: float | None = None,
    ) -> None:
        self.n, self.q = n, q
        self.eps = eps
        self.space = space
        self.exponent_constant = exponent_constant
        if space == StateSpace.FULL:
            graph = block_graph(n, q)
            self.moves = None
        else:
            self.moves = composition_moves(n, q, space == StateSpace.FOLDED)
            graph = self.moves.graph
        base, statistic, _ = gibbs_weights(n, q, space)
        super().__init__(graph, schedule, statistic, base_log_weight=base)

    @classmethod
    def reversed(
        cls,
        n: int,
        q: int,
        beta: float,
        eps: float,
        space: StateSpace = StateSpace.FOLDED,
        exponent_constant: float | None = None,
    ) -> PottsAnnealing:
        """Linear schedule from beta0 = n log q + log(6 / eps) down to ``beta``."""
        schedule = Schedule.linear_down(init_beta(n, q, eps), beta)
        return cls(n, q, schedule, eps, space, exponent_constant)

    @property
    def beta0(self) -> float:
        return self.schedule.start

    @property
    def beta(self) -> float:
        return self.schedule.end

    def kernel_for(self, pi: ProbVector) -> RateKernel:
        if self.moves is None:
            return block_glauber_kernel(pi, self.n, self.q)
        return self.moves.kernel(np.log(pi.values) - self.base_log_weight)

    def initial(self) -> ProbVector:
        if self.eps is None:
            raise ValueError("The low-temperature start needs eps")
        return initial_mixture(self.n, self.q, self.eps, self.space)

    def stability_window(self, eps: float, horizon: float) -> float:
        """eta = eps / (24 (q-1) |beta0 - beta| T)."""
        gap = abs(self.beta0 - self.beta)
        if gap == 0.0 or horizon == 0.0:
            return math.inf
        return eps / (24.0 * (self.q - 1) * gap * horizon)

    def stability_bound(self, window: float) -> float:
        """exp(2 (q-1) |delta beta|) - 1 over a parameter window of width ``window``."""
        return math.expm1(2.0 * (self.q - 1) * abs(self.beta0 - self.beta) * window)

    def theorem_horizon(self, eps: float) -> float | None:
        """2 n^(Cq) (beta0 - beta)^2 / eps when an exponent constant C is supplied."""
        if self.exponent_constant is None:
            return None
        scale = float(self.n) ** (self.exponent_constant * self.q)
        return 2.0 * scale * (self.beta0 - self.beta) ** 2 / eps

    def theorem_layers(self, eps: float) -> int | None:
        if self.exponent_constant is None:
            return None
        scale = float(self.n) ** (self.exponent_constant * self.q)
        gap = abs(self.beta0 - self.beta)
        return max(1, math.ceil(48.0 * (self.q - 1) * scale * gap**3 / eps**2))

    def __repr__(self) -> str:
        return (
            f"PottsAnnealing(n={self.n}, q={self.q}, beta0={self.beta0:.4g}, "
            f"beta={self.beta:.4g}, space={self.space.value})"
        )


def measure_derivative(n: int, q: int, beta: float, beta_prime: float) -> np.ndarray:
    """d/ds of the folded measure: (beta' / n) pi(m) (H(m) - E H) with H = sum_a m_a^2."""
    chain = ProjectedPottsChain(n, q, beta, folded=True)
    h = (chain.states.astype(float) ** 2).sum(axis=1)
    pi = chain.measure.values
    return beta_prime / n * pi * (h - chain.measure.expectation(h))


def potts_action(
    n: int, q: int, schedule: Schedule, grid: int = DEFAULT_NODES
) -> PottsActionReport:
    """Exact folded action next to the cost of the constructed flux, node by node."""
    nodes = np.linspace(0.0, 1.0, grid)
    lowest = min(schedule.beta(float(s)) for s in nodes)
    if lowest < q / 2.0:
        raise PreconditionBeta(f"Schedule reaches beta={lowest:.4g} below q/2 = {q / 2}")
    problem = PottsAnnealing(n, q, schedule)
    exact = action(problem.curve(grid))
    graph = problem.graph
    index = {label: i for i, label in enumerate(graph.states)}

    samples = np.empty(nodes.size)
    for i, s in enumerate(nodes):
        beta = schedule.beta(float(s))
        rate = measure_derivative(n, q, beta, schedule.beta_prime(float(s)))
        flux, _ = greedy_flux(graph, rate, transport_paths(n, q, beta, index))
        samples[i] = flux_cost(problem.capacity_for(problem.measure(float(s))), flux)
    constructive = float(simpson(samples, x=nodes))

    exact_samples = np.asarray(exact.samples)
    holds = bool(np.all(exact_samples <= samples * (1.0 + COMPARISON_RTOL) + 1e-14))
    logger.info(
        "potts n=%d q=%d: exact action %.6g, constructive %.6g", n, q, exact.value, constructive
    )
    if not holds:
        worst = int(np.argmax(exact_samples - samples))
        raise BoundViolation(
            f"Metric derivative {exact_samples[worst]:.6g} exceeds the flux cost "
            f"{samples[worst]:.6g} at s={nodes[worst]:.4g}"
        )
    return PottsActionReport(
        exact=exact,
        constructive=constructive,
        constructive_samples=samples.tolist(),
        holds=holds,
    )


def potts_pipeline(
    n: int,
    q: int,
    beta_target: float,
    eps: float,
    horizon_rule: HorizonRule = HorizonRule.ACTION,
    exponent_constant: float | None = None,
    grid: int = DEFAULT_NODES,
    full_space: bool | None = None,
) -> PottsComplexityReport:
    """Anneal to ``beta_target`` on the folded chain, and on [q]^n when it is small enough."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    check_low_temperature(q, beta_target)
    if horizon_rule == HorizonRule.THEOREM and exponent_constant is None:
        raise ValueError("The closed-form Potts horizon needs an exponent constant")

    problem = PottsAnnealing.reversed(
        n, q, beta_target, eps, StateSpace.FOLDED, exponent_constant
    )
    verdict = verify_error_bound(problem, eps, grid=grid, horizon_rule=horizon_rule)
    bound = problem.stability_bound(1.0 / verdict.layers)
    if verdict.delta > bound * (1.0 + COMPARISON_RTOL):
        logger.warning(
            "local stability %.3e exceeds exp(2(q-1)|dbeta|) - 1 = %.3e", verdict.delta, bound
        )

    full_kl = None
    run_full = full_size(n, q) <= MAX_KERNEL_STATES if full_space is None else full_space
    if run_full:
        full = PottsAnnealing.reversed(n, q, beta_target, eps, StateSpace.FULL)
        config = AnnealConfig(horizon=verdict.horizon, layers=verdict.layers)
        full_kl = kl(full.target(), run_exact(full.kernel, config, full.initial()))
        logger.info("potts full space (%d states): KL %.4g", full.graph.size, full_kl)

    passed = verdict.passed and (full_kl is None or full_kl <= eps)
    return PottsComplexityReport(
        n=n,
        q=q,
        beta=beta_target,
        beta0=problem.beta0,
        eps=eps,
        action=verdict.action,
        horizon=verdict.horizon,
        layers=verdict.layers,
        horizon_rule=horizon_rule,
        init_kl=verdict.init_kl,
        final_kl=verdict.measured_kl,
        full_space_kl=full_kl,
        stability=verdict.delta,
        passed=passed,
    )
