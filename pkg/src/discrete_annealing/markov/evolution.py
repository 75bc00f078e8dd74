"""Exact Fokker-Planck evolution under piecewise-constant rate kernels.

Marginals evolve as d/dt mu_t = mu_t p_t. On each constant piece the action of
the matrix exponential is computed with scipy's scaling-and-squaring Pade
``expm`` (dense, small spaces) or ``expm_multiply`` (sparse, larger spaces).
"""

from __future__ import annotations

import logging
import math
import warnings
from collections.abc import Callable, Sequence

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike
from scipy.sparse.linalg import expm_multiply

from discrete_annealing.errors import InvalidDistribution, StiffnessWarning
from discrete_annealing.graph.measures import ProbVector
from discrete_annealing.markov.kernel import RateKernel

logger = logging.getLogger(__name__)

PADE13_THETA = 5.371920351148152
MAX_SQUARINGS = 60
DENSE_LIMIT = 64


class KernelSchedule:
    """Piecewise-constant kernel schedule: piece k holds ``kernel_at(k)`` for ``durations[k]``."""

    def __init__(
        self,
        durations: Sequence[float],
        kernels: Sequence[RateKernel] | Callable[[int], RateKernel],
    ) -> None:
        d = np.asarray(durations, dtype=float)
        if d.ndim != 1 or np.any(d < 0.0) or not np.all(np.isfinite(d)):
            raise ValueError("Piece durations must be finite and nonnegative")
        if not callable(kernels) and len(kernels) != d.size:
            raise ValueError(f"{len(kernels)} kernels for {d.size} pieces")
        self.durations = d
        self._kernels = kernels

    @classmethod
    def constant(cls, kernel: RateKernel, horizon: float) -> KernelSchedule:
        return cls([horizon], [kernel])

    @classmethod
    def layered(
        cls, kernel_at: Callable[[int], RateKernel], horizon: float, layers: int
    ) -> KernelSchedule:
        """``layers`` pieces of equal length horizon / layers."""
        return cls(np.full(layers, horizon / layers), kernel_at)

    def kernel_at(self, k: int) -> RateKernel:
        if callable(self._kernels):
            return self._kernels(k)
        return self._kernels[k]

    @property
    def horizon(self) -> float:
        return float(self.durations.sum())

    def breakpoints(self) -> np.ndarray:
        """End time of every piece."""
        return np.cumsum(self.durations)

    def __len__(self) -> int:
        return int(self.durations.size)

    def __repr__(self) -> str:
        return f"KernelSchedule(pieces={len(self)}, horizon={self.horizon:.6g})"


def squarings_needed(kernel: RateKernel, duration: float) -> int:
    """Scaling-and-squaring steps for exp(duration * p) at Pade order 13."""
    norm = duration * float(np.abs(kernel.rates).sum(axis=0).max(initial=0.0))
    if norm <= PADE13_THETA:
        return 0
    return math.ceil(math.log2(norm / PADE13_THETA))


class FokkerPlanckIntegrator:
    """Propagates row vectors through a kernel schedule.

    The dense exponential of the last (kernel, duration) pair is cached, so
    constant schedules split into many pieces cost one ``expm``.
    """

    def __init__(self, dense_limit: int = DENSE_LIMIT, max_squarings: int = MAX_SQUARINGS) -> None:
        self.dense_limit = dense_limit
        self.max_squarings = max_squarings
        self.last_drift = 0.0
        self._cached: tuple[RateKernel, float, np.ndarray] | None = None

    def _step(self, v: np.ndarray, kernel: RateKernel, duration: float) -> np.ndarray:
        squarings = squarings_needed(kernel, duration)
        if squarings > self.max_squarings:
            warnings.warn(
                f"exp({duration:.3g} p) needs {squarings} squarings", StiffnessWarning, stacklevel=3
            )
        if kernel.size > self.dense_limit:
            return expm_multiply(kernel.sparse().T * duration, v)
        cached = self._cached
        if cached is not None and cached[0] is kernel and cached[1] == duration:
            expm = cached[2]
        else:
            expm = scipy.linalg.expm(kernel.rates * duration)
            self._cached = (kernel, duration, expm)
        return v @ expm

    def trajectory(self, vector: ArrayLike, schedule: KernelSchedule) -> list[np.ndarray]:
        """Row vector after every piece of ``schedule``."""
        v = np.array(vector, dtype=float)
        history: list[np.ndarray] = []
        for k, duration in enumerate(schedule.durations):
            if duration > 0.0:
                v = self._step(v, schedule.kernel_at(k), float(duration))
            history.append(v.copy())
        return history

    def propagate(self, vector: ArrayLike, schedule: KernelSchedule) -> np.ndarray:
        """Row vector after the last piece of ``schedule``."""
        v = np.array(vector, dtype=float)
        for k, duration in enumerate(schedule.durations):
            if duration > 0.0:
                v = self._step(v, schedule.kernel_at(k), float(duration))
        return v

    def evolve(self, mu0: ProbVector, schedule: KernelSchedule) -> ProbVector:
        """Exact marginal at the schedule's horizon, renormalized."""
        return self._finish(self.propagate(mu0.values, schedule))

    def _finish(self, v: np.ndarray) -> ProbVector:
        self.last_drift = abs(float(v.sum()) - 1.0)
        if self.last_drift > 1e-8:
            raise InvalidDistribution(f"Evolution lost mass: drift {self.last_drift:.3e}")
        logger.debug("evolution mass drift %.3e", self.last_drift)
        floored = np.maximum(v, np.finfo(float).tiny)
        return ProbVector(floored / floored.sum())

    def marginals(self, mu0: ProbVector, schedule: KernelSchedule) -> list[ProbVector]:
        """Marginal at the end of every piece."""
        return [self._finish(v) for v in self.trajectory(mu0.values, schedule)]


def evolve_with_drift(mu0: ProbVector, schedule: KernelSchedule) -> tuple[ProbVector, float]:
    """Exact marginal mu_T and the total-mass drift removed by renormalization."""
    integrator = FokkerPlanckIntegrator()
    final = integrator.evolve(mu0, schedule)
    return final, integrator.last_drift


def evolve_fokker_planck(mu0: ProbVector, schedule: KernelSchedule) -> ProbVector:
    """Exact marginal mu_T of the chain started at ``mu0``."""
    return evolve_with_drift(mu0, schedule)[0]


def apply_semigroup(kernel: RateKernel, f: ArrayLike, t: float) -> np.ndarray:
    """Heat flow f_t = exp(t p) f of a state function (column action)."""
    return scipy.linalg.expm(kernel.rates * t) @ np.asarray(f, dtype=float)
