"""Mean-field Ising model on the full configuration space.

Configurations are encoded as integers 0 .. 2^n - 1; bit i set means spin i
is -1. The Gibbs measure is mu_beta(sigma) ~ exp(beta M(sigma)^2 / (2n)) with
M the total magnetization, and the single-site Glauber dynamics flips site i
at rate (1/n) pi(sigma^i) / (pi(sigma) + pi(sigma^i)).
"""

from __future__ import annotations

import logging
from functools import lru_cache

import numpy as np
from pydantic import BaseModel, Field
from scipy.special import expit

from discrete_annealing.errors import TooLarge
from discrete_annealing.graph.measures import ProbVector
from discrete_annealing.graph.state_graph import StateGraph
from discrete_annealing.markov.kernel import RateKernel, capacity_from_kernel
from discrete_annealing.symmetry.projection import Projection

logger = logging.getLogger(__name__)

MAX_FULL_SITES = 12


def _check_size(n: int) -> None:
    if n < 1:
        raise ValueError(f"Ising model needs at least one site, got n={n}")
    if n > MAX_FULL_SITES:
        raise TooLarge(f"Full Ising space 2^{n} exceeds the enumeration cap 2^{MAX_FULL_SITES}")


@lru_cache(maxsize=16)
def hypercube(n: int) -> StateGraph:
    """Hypercube {+-1}^n; sigma and sigma^i are joined for every site i."""
    _check_size(n)
    size = 1 << n
    edges = [(x, x | (1 << i)) for x in range(size) for i in range(n) if not x & (1 << i)]
    return StateGraph(list(range(size)), edges)


@lru_cache(maxsize=16)
def magnetizations(n: int) -> np.ndarray:
    """M(sigma) = n - 2 * (number of -1 spins) for every configuration."""
    _check_size(n)
    codes = np.arange(1 << n, dtype=np.int64)
    minus = np.zeros_like(codes)
    for i in range(n):
        minus += (codes >> i) & 1
    m = n - 2 * minus
    m.flags.writeable = False
    return m


def ising_distribution(n: int, beta: float) -> ProbVector:
    """mu_beta on the full space, normalized by enumeration."""
    m = magnetizations(n).astype(float)
    return ProbVector.from_log_weights(beta * m**2 / (2.0 * n))


def glauber_kernel(pi: ProbVector, n: int | None = None) -> RateKernel:
    """Single-site Glauber dynamics targeting ``pi`` on {+-1}^n.

    The kernel is checked for detailed balance against ``pi``.
    """
    sites = n if n is not None else int(pi.size).bit_length() - 1
    if pi.size != 1 << sites:
        raise ValueError(f"Distribution of size {pi.size} is not on {{+-1}}^{sites}")
    graph = hypercube(sites)
    xs, ys = graph.edges[:, 0], graph.edges[:, 1]
    log_pi = np.log(pi.values)
    # heat-bath acceptance pi(y) / (pi(x) + pi(y)) in logistic form
    forward = expit(log_pi[ys] - log_pi[xs]) / sites
    backward = expit(log_pi[xs] - log_pi[ys]) / sites
    kernel = RateKernel.from_edge_rates(graph, forward, backward)
    capacity_from_kernel(kernel, pi)
    return kernel


def magnetization_projection(n: int) -> Projection:
    """sigma -> M(sigma) onto {-n, -n+2, ..., n}."""
    return Projection(hypercube(n), magnetizations(n).tolist())


def folding_projection(n: int) -> Projection:
    """sigma -> |M(sigma)| onto the nonnegative magnetizations."""
    return Projection(hypercube(n), np.abs(magnetizations(n)).tolist())


class IsingModel(BaseModel):
    """Mean-field Ising model with n sites at inverse temperature beta."""

    n: int = Field(ge=1)
    beta: float = Field(ge=0.0)

    @property
    def graph(self) -> StateGraph:
        return hypercube(self.n)

    def distribution(self) -> ProbVector:
        return ising_distribution(self.n, self.beta)

    def kernel(self) -> RateKernel:
        return glauber_kernel(self.distribution(), self.n)
