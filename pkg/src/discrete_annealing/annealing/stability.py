"""Local stability of a kernel family.

A family s -> p_s is delta-locally stable on windows of width eta when
|p_{s'}(x, y) / p_s(x, y) - 1| <= delta for all |s - s'| <= eta on every edge.
"""

from __future__ import annotations

import logging
from collections.abc import Callable

import numpy as np
from numpy.typing import ArrayLike

from discrete_annealing.errors import ZeroRateEdge
from discrete_annealing.markov.kernel import RateKernel

logger = logging.getLogger(__name__)

PROBES_PER_WINDOW = 5


def _directed_rates(kernel: RateKernel) -> np.ndarray:
    fwd, bwd = kernel.edge_rates()
    return np.concatenate([fwd, bwd])


def local_stability(
    kernels: Callable[[float], RateKernel],
    eta: float,
    probe: ArrayLike | int = 21,
) -> float:
    """Largest relative rate change over windows of width ``eta``.

    For each probe s the family is compared against s' on an evenly spaced
    window [s - eta, s + eta] clipped to [0, 1].
    """
    centers = np.linspace(0.0, 1.0, probe) if isinstance(probe, int) else np.asarray(probe, float)
    worst = 0.0
    for s in centers:
        base = _directed_rates(kernels(float(s)))
        for t in np.linspace(s - eta, s + eta, PROBES_PER_WINDOW):
            if t < 0.0 or t > 1.0 or t == s:
                continue
            other = _directed_rates(kernels(float(t)))
            zero_base, zero_other = base == 0.0, other == 0.0
            if np.any(zero_base != zero_other):
                k = int(np.flatnonzero(zero_base != zero_other)[0])
                raise ZeroRateEdge(
                    f"Directed edge {k} changes support between s={s:.6g} and s'={t:.6g}"
                )
            live = ~zero_base
            if np.any(live):
                worst = max(worst, float(np.max(np.abs(other[live] / base[live] - 1.0))))
    logger.debug("local stability over eta=%.3e: %.3e", eta, worst)
    return worst
