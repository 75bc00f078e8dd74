"""Mean-field Potts model on the full configuration space [q]^n.

Configurations are indexed by their base-q code, site 0 most significant. The
Gibbs measure is mu_beta(sigma) ~ exp((beta / n) sum_a M_a(sigma)^2) with M_a
the number of sites of color a. The (q-1)-block Glauber dynamics picks a block
of q - 1 sites uniformly and resamples it from the conditional law.
"""

from __future__ import annotations

import itertools
import logging
import math
from functools import lru_cache

import numpy as np
from pydantic import BaseModel, Field, model_validator

from discrete_annealing.errors import TooLarge
from discrete_annealing.graph.measures import ProbVector
from discrete_annealing.graph.state_graph import StateGraph
from discrete_annealing.markov.kernel import RateKernel
from discrete_annealing.potts.projected import compositions, is_sorted
from discrete_annealing.symmetry.projection import Projection

logger = logging.getLogger(__name__)

MAX_FULL_STATES = 200_000
MAX_KERNEL_STATES = 5_000


def full_size(n: int, q: int) -> int:
    return q**n


def _check_full(n: int, q: int, cap: int = MAX_FULL_STATES) -> None:
    if n < 1 or q < 2:
        raise ValueError(f"Potts model needs n >= 1 and q >= 2, got n={n}, q={q}")
    if full_size(n, q) > cap:
        raise TooLarge(f"Full Potts space {q}^{n} exceeds the cap of {cap} states")


@lru_cache(maxsize=8)
def configurations(n: int, q: int) -> np.ndarray:
    """(q^n, n) array of colors 0 .. q-1, row i the configuration with code i."""
    _check_full(n, q)
    codes = np.arange(full_size(n, q), dtype=np.int64)
    powers = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    colors = (codes[:, None] // powers[None, :]) % q
    colors.flags.writeable = False
    return colors


@lru_cache(maxsize=8)
def color_counts(n: int, q: int) -> np.ndarray:
    """(q^n, q) magnetization vectors M(sigma)."""
    colors = configurations(n, q)
    counts = np.stack([(colors == a).sum(axis=1) for a in range(q)], axis=1)
    counts.flags.writeable = False
    return counts


def energy(n: int, q: int) -> np.ndarray:
    """sum_a M_a(sigma)^2 / n for every configuration."""
    return (color_counts(n, q).astype(float) ** 2).sum(axis=1) / n


def potts_distribution(n: int, q: int, beta: float) -> ProbVector:
    """mu_beta on the full space, normalized by enumeration."""
    return ProbVector.from_log_weights(beta * energy(n, q))


def monochrome_states(n: int, q: int) -> np.ndarray:
    """Codes of the q configurations (a, a, ..., a)."""
    ones = sum(q**i for i in range(n))
    return np.arange(q, dtype=np.int64) * ones


# ---------------------------------------------------------------------------
# Block Glauber dynamics
# ---------------------------------------------------------------------------


@lru_cache(maxsize=8)
def _block_groups(n: int, q: int) -> tuple[np.ndarray, ...]:
    """Per block of q - 1 sites, the configurations sharing all spins outside the block.

    Each entry has shape (groups, q^(q-1)).
    """
    _check_full(n, q, MAX_KERNEL_STATES)
    colors = configurations(n, q)
    codes = np.arange(full_size(n, q), dtype=np.int64)
    powers = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    width = q ** (q - 1)
    groups = []
    for block in itertools.combinations(range(n), q - 1):
        idx = list(block)
        outside = codes - (colors[:, idx] * powers[idx]).sum(axis=1)
        order = np.argsort(outside, kind="stable")
        groups.append(order.reshape(-1, width))
    return tuple(groups)


@lru_cache(maxsize=8)
def block_graph(n: int, q: int) -> StateGraph:
    """Configurations joined when they differ on at most q - 1 sites."""
    size = full_size(n, q)
    support = np.zeros((size, size), dtype=bool)
    for members in _block_groups(n, q):
        support[members[:, :, None], members[:, None, :]] = True
    return StateGraph.from_support(list(range(size)), support)


def block_glauber_kernel(pi: ProbVector, n: int, q: int) -> RateKernel:
    """(q-1)-block heat-bath dynamics targeting ``pi`` on [q]^n.

    p(sigma, sigma') sums, over blocks I that contain every site where the two
    differ, 1 / C(n, q-1) times pi(sigma') over the mass of the block's
    resampling group.
    """
    size = full_size(n, q)
    if pi.size != size:
        raise ValueError(f"Distribution of size {pi.size} is not on [{q}]^{n}")
    groups = _block_groups(n, q)
    weight = 1.0 / math.comb(n, q - 1)
    rates = np.zeros((size, size))
    p = pi.values
    for members in groups:
        mass = p[members]
        probs = mass / mass.sum(axis=1, keepdims=True)
        rates[members[:, :, None], members[:, None, :]] += weight * probs[:, None, :]
    return RateKernel.from_off_diagonal(block_graph(n, q), rates)


def magnetization_projection(n: int, q: int) -> Projection:
    """sigma -> M(sigma), onto the magnetization vectors in lexicographic order."""
    labels = [tuple(row) for row in color_counts(n, q).tolist()]
    order = [tuple(row) for row in compositions(n, q).tolist()]
    return Projection(block_graph(n, q), labels, order=order)


def sorted_projection(n: int, q: int) -> Projection:
    """sigma -> M(sigma) sorted into non-increasing order."""
    labels = [tuple(sorted(row, reverse=True)) for row in color_counts(n, q).tolist()]
    states = compositions(n, q)
    order = [tuple(row) for row in states[is_sorted(states)].tolist()]
    return Projection(block_graph(n, q), labels, order=order)


class PottsModel(BaseModel):
    """Mean-field Potts model with n sites, q colors, inverse temperature beta."""

    n: int = Field(ge=1)
    q: int = Field(ge=2)
    beta: float = Field(ge=0.0)

    @model_validator(mode="after")
    def enough_sites(self) -> PottsModel:
        if self.n < self.q:
            raise ValueError(f"Potts model needs n >= q, got n={self.n}, q={self.q}")
        return self

    @property
    def graph(self) -> StateGraph:
        return block_graph(self.n, self.q)

    def distribution(self) -> ProbVector:
        return potts_distribution(self.n, self.q, self.beta)

    def kernel(self) -> RateKernel:
        return block_glauber_kernel(self.distribution(), self.n, self.q)
