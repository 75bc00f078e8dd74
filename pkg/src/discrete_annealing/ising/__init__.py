"""Mean-field Ising model: Gibbs measures, Glauber dynamics and its projections."""

from discrete_annealing.ising.landscape import (
    classify_profile,
    dlog_folded_measure,
    dlog_norm_bound,
    landscape_classify,
    landscape_profile,
)
from discrete_annealing.ising.model import (
    IsingModel,
    folding_projection,
    glauber_kernel,
    hypercube,
    ising_distribution,
    magnetization_projection,
    magnetizations,
)
from discrete_annealing.ising.pipeline import IsingAnnealing, ising_pipeline
from discrete_annealing.ising.projected import ProjectedIsingChain, projected_chain

__all__ = [
    "IsingAnnealing",
    "IsingModel",
    "ProjectedIsingChain",
    "classify_profile",
    "dlog_folded_measure",
    "dlog_norm_bound",
    "folding_projection",
    "glauber_kernel",
    "hypercube",
    "ising_distribution",
    "ising_pipeline",
    "landscape_classify",
    "landscape_profile",
    "magnetization_projection",
    "magnetizations",
    "projected_chain",
]
