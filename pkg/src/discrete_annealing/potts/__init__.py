"""Mean-field Potts model: block Glauber dynamics, projections, paths and annealing."""

from discrete_annealing.potts.flux import TransportPlan, greedy_flux, route_unit_flow
from discrete_annealing.potts.initializer import initial_mixture, init_beta, potts_init
from discrete_annealing.potts.model import (
    PottsModel,
    block_glauber_kernel,
    block_graph,
    color_counts,
    configurations,
    magnetization_projection,
    monochrome_states,
    potts_distribution,
    sorted_projection,
)
from discrete_annealing.potts.paths import (
    check_all_paths,
    diagonal_maximizer,
    path_guarantees,
    potts_path_construction,
    transport_paths,
)
from discrete_annealing.potts.pipeline import (
    PottsAnnealing,
    measure_derivative,
    potts_action,
    potts_pipeline,
)
from discrete_annealing.potts.projected import (
    ProjectedPottsChain,
    compositions,
    diagonal_profile,
    fold_multiplicity,
    log_projected_weight,
    potts_as_ising_gap,
    projected_potts_chain,
    projected_size,
    size_bound,
)

__all__ = [
    "PottsAnnealing",
    "PottsModel",
    "ProjectedPottsChain",
    "TransportPlan",
    "block_glauber_kernel",
    "block_graph",
    "check_all_paths",
    "color_counts",
    "compositions",
    "configurations",
    "diagonal_maximizer",
    "diagonal_profile",
    "fold_multiplicity",
    "greedy_flux",
    "init_beta",
    "initial_mixture",
    "log_projected_weight",
    "magnetization_projection",
    "measure_derivative",
    "monochrome_states",
    "path_guarantees",
    "potts_action",
    "potts_as_ising_gap",
    "potts_distribution",
    "potts_init",
    "potts_path_construction",
    "potts_pipeline",
    "projected_potts_chain",
    "projected_size",
    "route_unit_flow",
    "size_bound",
    "sorted_projection",
    "transport_paths",
]
