"""Low-temperature start for Potts annealing.

At beta0 = n log q + log(6 / eps) the Gibbs measure sits almost entirely on
the q monochromatic configurations, so the mixture
nu = (eps / 6) Unif(Omega) + (1 - eps / 6) Unif(Omega_0) is within eps / 3 of
it in KL. The same KL is available on the projected and folded spaces because
both measures are uniform on every fiber.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from discrete_annealing.graph.measures import ProbVector
from discrete_annealing.markov.divergences import kl
from discrete_annealing.models import InitCertificate, StateSpace
from discrete_annealing.potts.model import (
    MAX_FULL_STATES,
    energy,
    full_size,
    monochrome_states,
)
from discrete_annealing.potts.projected import (
    compositions,
    fold_multiplicity,
    is_sorted,
    log_multinomial,
)

logger = logging.getLogger(__name__)


def init_beta(n: int, q: int, eps: float) -> float:
    """beta0 = n log q + log(6 / eps)."""
    return n * math.log(q) + math.log(6.0 / eps)


def default_space(n: int, q: int) -> StateSpace:
    return StateSpace.FULL if full_size(n, q) <= MAX_FULL_STATES else StateSpace.FOLDED


def gibbs_weights(
    n: int, q: int, space: StateSpace
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(log fiber size, sum_a m_a^2 / n, monochrome mask) over the states of ``space``."""
    if space == StateSpace.FULL:
        statistic = energy(n, q)
        mono = np.zeros(statistic.size, dtype=bool)
        mono[monochrome_states(n, q)] = True
        return np.zeros_like(statistic), statistic, mono
    states = compositions(n, q)
    if space == StateSpace.FOLDED:
        states = states[is_sorted(states)]
    base = log_multinomial(n, states)
    if space == StateSpace.FOLDED:
        base = base + np.log(fold_multiplicity(states))
    statistic = (states.astype(float) ** 2).sum(axis=1) / n
    return base, statistic, states.max(axis=1) == n


def initial_mixture(n: int, q: int, eps: float, space: StateSpace) -> ProbVector:
    """nu pushed onto ``space``."""
    base, _, mono = gibbs_weights(n, q, space)
    # uniform mass of each state's fiber, then the monochrome atoms
    values = eps / 6.0 * np.exp(base - n * math.log(q))
    values[mono] += (1.0 - eps / 6.0) / mono.sum()
    return ProbVector.normalized(values)


def potts_init(
    n: int, q: int, eps: float, space: StateSpace | None = None
) -> tuple[ProbVector, InitCertificate]:
    """Starting mixture and a certificate that KL(mu_beta0 || nu) < eps / 3."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if n < 1 or q < 2:
        raise ValueError(f"Potts model needs n >= 1 and q >= 2, got n={n}, q={q}")
    space = space if space is not None else default_space(n, q)
    beta0 = init_beta(n, q, eps)
    base, statistic, mono = gibbs_weights(n, q, space)
    target = ProbVector.from_log_weights(base + beta0 * statistic)
    nu = initial_mixture(n, q, eps, space)
    divergence = kl(target, nu)
    certificate = InitCertificate(
        n=n,
        q=q,
        eps=eps,
        beta0=beta0,
        kl=divergence,
        threshold=eps / 3.0,
        monochrome_mass=float(target.values[mono].sum()),
        space=space,
        certified=divergence < eps / 3.0,
    )
    logger.info(
        "potts init n=%d q=%d eps=%.3g on %s space: beta0=%.4g KL=%.3g",
        n,
        q,
        eps,
        space.value,
        beta0,
        divergence,
    )
    return nu, certificate

