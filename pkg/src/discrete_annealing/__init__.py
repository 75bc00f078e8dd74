"""Discrete Annealing: optimal transport tools for simulated annealing on finite state spaces.

This package computes the discrete transport action of a curve of Gibbs
measures, turns it into the horizon and layer count of a Poissonized annealing
run, and checks the resulting KL guarantee end to end on the mean-field Ising
and Potts models.
"""

__version__ = "0.1.0"

from discrete_annealing.models import (
    ActionReport,
    AnnealConfig,
    AnnealResult,
    ErrorBoundReport,
    HorizonRule,
    InitCertificate,
    IsingComplexityReport,
    LandscapeReport,
    LandscapeShape,
    ModelKind,
    PottsActionReport,
    PottsComplexityReport,
    RunMode,
    StateSpace,
    SuiteReport,
)

__all__ = [
    "__version__",
    "ActionReport",
    "AnnealConfig",
    "AnnealResult",
    "ErrorBoundReport",
    "HorizonRule",
    "InitCertificate",
    "IsingComplexityReport",
    "LandscapeReport",
    "LandscapeShape",
    "ModelKind",
    "PottsActionReport",
    "PottsComplexityReport",
    "RunMode",
    "StateSpace",
    "SuiteReport",
]
