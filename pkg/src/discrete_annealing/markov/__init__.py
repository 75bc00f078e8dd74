"""Continuous-time Markov chains on state graphs.

Rate kernels and reversibility, Dirichlet forms, exact Fokker-Planck
evolution, divergences, and functional-inequality constants.
"""

from discrete_annealing.markov.divergences import (
    chi2,
    entropy_functional,
    kl,
    tv_distance,
    variance_functional,
)
from discrete_annealing.markov.evolution import (
    FokkerPlanckIntegrator,
    KernelSchedule,
    apply_semigroup,
    evolve_fokker_planck,
    evolve_with_drift,
)
from discrete_annealing.markov.inequalities import (
    canonical_paths_congestion,
    gibbs_speed_bound,
    mlsi_constant,
    poincare_constant,
    spectral_gap,
)
from discrete_annealing.markov.kernel import (
    RateKernel,
    ReversiblePair,
    capacity_from_kernel,
    check_stochastic,
    dirichlet_form,
)

__all__ = [
    "FokkerPlanckIntegrator",
    "KernelSchedule",
    "RateKernel",
    "ReversiblePair",
    "apply_semigroup",
    "canonical_paths_congestion",
    "capacity_from_kernel",
    "check_stochastic",
    "chi2",
    "dirichlet_form",
    "entropy_functional",
    "evolve_fokker_planck",
    "evolve_with_drift",
    "gibbs_speed_bound",
    "kl",
    "mlsi_constant",
    "poincare_constant",
    "spectral_gap",
    "tv_distance",
    "variance_functional",
]
