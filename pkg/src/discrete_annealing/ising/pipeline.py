"""Annealing the mean-field Ising model from infinite temperature.

The schedule is beta(s) = beta * s, so the chain starts at the uniform measure
and needs no initialization error. The action is computed on the folded chain
and compared with n^5 beta^2 / 16; the closed-form horizon and layer count are
T = 2 n^5 beta^2 / eps and N = ceil(48 n^5 beta^3 / eps^2).
"""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy.special import expit

from discrete_annealing.annealing.bounds import verify_error_bound
from discrete_annealing.annealing.problem import GibbsAnnealingProblem
from discrete_annealing.annealing.schedule import Schedule
from discrete_annealing.errors import BoundViolation
from discrete_annealing.graph.measures import ProbVector
from discrete_annealing.ising.model import glauber_kernel, hypercube, magnetizations
from discrete_annealing.ising.projected import MAX_PROJECTED_SITES, ProjectedIsingChain
from discrete_annealing.markov.kernel import RateKernel
from discrete_annealing.models import HorizonRule, IsingComplexityReport, StateSpace
from discrete_annealing.transport.action import DEFAULT_NODES, action

logger = logging.getLogger(__name__)

MAX_EXACT_SITES = 12


class IsingAnnealing(GibbsAnnealingProblem):
    """Glauber annealing of the mean-field Ising model on one of its state spaces.

    On the projected and folded spaces the kernel is the lumped Glauber chain;
    started from a fiber-uniform law it carries the same KL to the target as
    the full-space chain.
    """

    def __init__(
        self,
        n: int,
        beta: float,
        space: StateSpace = StateSpace.FOLDED,
        schedule: Schedule | None = None,
    ) -> None:
        self.n = n
        self.beta = float(beta)
        self.space = space
        if space == StateSpace.FULL:
            graph = hypercube(n)
            m = magnetizations(n).astype(float)
            base = np.zeros_like(m)
        else:
            chain = ProjectedIsingChain(n, 0.0, folded=space == StateSpace.FOLDED)
            graph = chain.graph
            m = chain.m.astype(float)
            base = chain.base_log_weight()
        self.magnetization = m
        super().__init__(
            graph,
            schedule if schedule is not None else Schedule.linear_up(beta),
            m**2 / (2.0 * n),
            base_log_weight=base,
        )

    def kernel_for(self, pi: ProbVector) -> RateKernel:
        if self.space == StateSpace.FULL:
            return glauber_kernel(pi, self.n)
        # per-configuration log weight within each fiber
        log_w = np.log(pi.values) - self.base_log_weight
        lo, hi = self.magnetization[:-1], self.magnetization[1:]
        n = self.n
        up = (n - lo) / (2.0 * n) * expit(log_w[1:] - log_w[:-1])
        down = (n + hi) / (2.0 * n) * expit(log_w[:-1] - log_w[1:])
        if self.space == StateSpace.FOLDED:
            up = np.where(lo == 0, 2.0 * up, up)
        return RateKernel.from_edge_rates(self.graph, up, down)

    def initial(self) -> ProbVector:
        return self.measure(0.0)

    def stability_window(self, eps: float, horizon: float) -> float:
        """eta = eps / (24 beta T)."""
        if self.beta == 0.0 or horizon == 0.0:
            return math.inf
        return eps / (24.0 * self.beta * horizon)

    def action_bound(self) -> float:
        """n^5 / 16 times the integral of beta'(s)^2 (beta^2 for the linear schedule)."""
        return self.n**5 * self.beta**2 / 16.0

    def theorem_horizon(self, eps: float) -> float:
        return 2.0 * self.n**5 * self.beta**2 / eps

    def theorem_layers(self, eps: float) -> int:
        return max(1, math.ceil(48.0 * self.n**5 * self.beta**3 / eps**2))

    def __repr__(self) -> str:
        return f"IsingAnnealing(n={self.n}, beta={self.beta}, space={self.space.value})"


def ising_pipeline(
    n: int,
    beta_target: float,
    eps: float,
    horizon_rule: HorizonRule = HorizonRule.THEOREM,
    grid: int = DEFAULT_NODES,
    run: bool | None = None,
) -> IsingComplexityReport:
    """Action, horizon and layer count for annealing to ``beta_target``.

    The exact end-to-end run is performed on the folded chain when ``run`` is
    true (default: for n <= 12).
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if not 1 <= n <= MAX_PROJECTED_SITES:
        raise ValueError(f"n must lie in [1, {MAX_PROJECTED_SITES}], got {n}")
    problem = IsingAnnealing(n, beta_target)
    report = action(problem.curve(grid))
    bound = problem.action_bound()
    if report.value > bound + report.error:
        raise BoundViolation(
            f"Ising action {report.value:.6g} exceeds n^5 beta^2 / 16 = {bound:.6g}"
        )
    logger.info(
        "ising n=%d beta=%.4g: action %.6g (bound %.6g)", n, beta_target, report.value, bound
    )

    if horizon_rule == HorizonRule.THEOREM:
        horizon = problem.theorem_horizon(eps)
        layers = problem.theorem_layers(eps)
    else:
        horizon = 2.0 * report.value / eps
        layers = problem.layers(eps, horizon)
    window = problem.stability_window(eps, horizon)

    final_kl = passed = None
    should_run = n <= MAX_EXACT_SITES if run is None else run
    if should_run:
        verdict = verify_error_bound(
            problem, eps, grid=grid, horizon_rule=horizon_rule, horizon=horizon, layers=layers
        )
        final_kl, passed = verdict.measured_kl, verdict.passed

    return IsingComplexityReport(
        n=n,
        beta=beta_target,
        eps=eps,
        action=report.value,
        curve=report,
        action_bound=bound,
        horizon=horizon,
        layers=layers,
        horizon_rule=horizon_rule,
        stability_window=window,
        final_kl=final_kl,
        passed=passed,
    )
