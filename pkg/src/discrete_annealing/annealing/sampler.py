"""Poissonized discrete annealing as a Monte Carlo sampler.

Every replicate starts from the initial sampler; in layer k = 1..N it draws
M_k ~ Pois(T / N) and applies the transition matrix P_{k/N} M_k times. All
replicates advance together as one state vector.

Randomness comes from Philox streams keyed by (seed, layer, round): round 0
of a layer draws the Poisson counts, round r >= 1 drives the r-th jump. Entry i
of every draw belongs to replicate i, so a replicate's path depends only on
(seed, i) and not on how many replicates run beside it.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Callable

import numpy as np
from scipy.stats import poisson

from discrete_annealing.markov.kernel import check_stochastic
from discrete_annealing.models import AnnealConfig, AnnealResult, RunMode

logger = logging.getLogger(__name__)

TransitionFn = Callable[[float], np.ndarray]
InitialSampler = Callable[[np.random.Generator, int], np.ndarray]


def stream(seed: int, layer: int, round_: int) -> np.random.Generator:
    """Counter-based generator for one (seed, layer, round) triple."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, layer, round_])))


def poisson_counts(u: np.ndarray, mean: float, max_jumps: int | None = None) -> np.ndarray:
    """Poisson(mean) counts by inversion of uniforms, optionally truncated."""
    if mean == 0.0:
        return np.zeros(u.shape, dtype=np.int64)
    counts = np.maximum(poisson.ppf(u, mean), 0).astype(np.int64)
    if max_jumps is not None:
        counts = np.minimum(counts, max_jumps)
    return counts


def sample_categorical(u: np.ndarray, cdf_rows: np.ndarray) -> np.ndarray:
    """Inverse-CDF draw per row: first index whose cumulative mass exceeds u."""
    picks = (u[:, None] >= cdf_rows).sum(axis=1)
    return np.minimum(picks, cdf_rows.shape[1] - 1)


def distribution_sampler(weights: np.ndarray) -> InitialSampler:
    """Initial sampler drawing i.i.d. states from a fixed distribution."""
    cdf = np.cumsum(np.asarray(weights, dtype=float))
    cdf /= cdf[-1]

    def draw(rng: np.random.Generator, replicates: int) -> np.ndarray:
        u = rng.random(replicates)
        return np.minimum(np.searchsorted(cdf, u, side="right"), cdf.size - 1)

    return draw


def run_sampler(
    transitions: TransitionFn,
    config: AnnealConfig,
    initial: InitialSampler,
) -> AnnealResult:
    """Run Poissonized annealing for ``config.replicates`` independent replicates."""
    started = time.perf_counter()
    replicates = config.replicates
    states = np.asarray(initial(stream(config.seed, 0, 0), replicates), dtype=np.int64)
    layer_jumps: list[int] = []
    cached_P: np.ndarray | None = None
    cdf = np.empty((0, 0))

    for k in range(1, config.layers + 1):
        counts = poisson_counts(
            stream(config.seed, k, 0).random(replicates), config.dt, config.max_jumps
        )
        total = int(counts.sum())
        layer_jumps.append(total)
        if total == 0:
            continue
        P = transitions(k / config.layers)
        if P is not cached_P:
            check_stochastic(P)
            cdf = np.cumsum(P, axis=1)
            cached_P = P
        for r in range(int(counts.max())):
            u = stream(config.seed, k, r + 1).random(replicates)
            active = counts > r
            states[active] = sample_categorical(u[active], cdf[states[active]])

    elapsed = time.perf_counter() - started
    logger.info(
        "sampler: %d replicates, %d layers, %d jumps in %.2fs",
        replicates,
        config.layers,
        sum(layer_jumps),
        elapsed,
    )
    return AnnealResult(
        mode=RunMode.SAMPLE,
        final_states=states.tolist(),
        total_jumps=sum(layer_jumps),
        layer_jumps=layer_jumps,
        elapsed_s=elapsed,
        seed=config.seed,
    )
