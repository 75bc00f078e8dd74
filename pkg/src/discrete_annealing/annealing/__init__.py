"""Poissonized discrete annealing.

Inverse-temperature schedules, the layered sampler and its exact-law
counterpart, local stability of kernel families, and end-to-end verification
of the KL error bound.
"""

from discrete_annealing.annealing.bounds import (
    decomposition_terms,
    plan_run,
    verify_error_bound,
)
from discrete_annealing.annealing.exact import exact_result, layered_schedule, run_exact
from discrete_annealing.annealing.problem import AnnealingProblem, GibbsAnnealingProblem
from discrete_annealing.annealing.sampler import (
    distribution_sampler,
    poisson_counts,
    run_sampler,
    stream,
)
from discrete_annealing.annealing.schedule import Schedule
from discrete_annealing.annealing.stability import local_stability

__all__ = [
    "AnnealingProblem",
    "GibbsAnnealingProblem",
    "Schedule",
    "decomposition_terms",
    "distribution_sampler",
    "exact_result",
    "layered_schedule",
    "local_stability",
    "plan_run",
    "poisson_counts",
    "run_exact",
    "run_sampler",
    "stream",
    "verify_error_bound",
]
