"""Inverse-temperature schedules s -> beta(s) on [0, 1]."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np

from discrete_annealing.models import ScheduleKind

FD_STEP = 1e-5
DERIVATIVE_TOL = 1e-8


class Schedule:
    """An inverse-temperature path with its derivative.

    Use :meth:`linear_up` (beta(s) = beta s), :meth:`linear_down`
    (beta(s) = beta0 - (beta0 - beta) s) or :meth:`custom`.
    """

    def __init__(
        self,
        kind: ScheduleKind,
        beta: Callable[[float], float],
        beta_prime: Callable[[float], float],
    ) -> None:
        self.kind = kind
        self._beta = beta
        self._beta_prime = beta_prime
        if self.start < 0.0 or self.end < 0.0:
            raise ValueError("Inverse temperatures must be nonnegative")

    @classmethod
    def linear_up(cls, beta: float) -> Schedule:
        if beta < 0.0:
            raise ValueError(f"beta must be nonnegative, got {beta}")
        return cls(ScheduleKind.LINEAR_UP, lambda s: beta * s, lambda s: beta)

    @classmethod
    def linear_down(cls, beta0: float, beta: float) -> Schedule:
        if beta0 < 0.0 or beta < 0.0:
            raise ValueError("Inverse temperatures must be nonnegative")
        slope = beta0 - beta
        return cls(ScheduleKind.LINEAR_DOWN, lambda s: beta0 - slope * s, lambda s: -slope)

    @classmethod
    def custom(
        cls, beta: Callable[[float], float], beta_prime: Callable[[float], float]
    ) -> Schedule:
        """User-supplied schedule; beta' is checked against finite differences."""
        schedule = cls(ScheduleKind.CUSTOM, beta, beta_prime)
        gap = schedule.derivative_gap()
        if gap > DERIVATIVE_TOL:
            raise ValueError(f"beta' disagrees with finite differences of beta by {gap:.3e}")
        return schedule

    def beta(self, s: float) -> float:
        return float(self._beta(s))

    def beta_prime(self, s: float) -> float:
        return float(self._beta_prime(s))

    @property
    def start(self) -> float:
        return self.beta(0.0)

    @property
    def end(self) -> float:
        return self.beta(1.0)

    def max_abs_derivative(self, nodes: int = 201) -> float:
        return max(abs(self.beta_prime(float(s))) for s in np.linspace(0.0, 1.0, nodes))

    def derivative_gap(self, nodes: int = 11) -> float:
        """Largest scaled gap between beta' and a central difference of beta."""
        worst = 0.0
        for s in np.linspace(FD_STEP, 1.0 - FD_STEP, nodes):
            fd = (self.beta(s + FD_STEP) - self.beta(s - FD_STEP)) / (2 * FD_STEP)
            exact = self.beta_prime(s)
            worst = max(worst, abs(fd - exact) / max(1.0, abs(exact)))
        return worst

    def __repr__(self) -> str:
        return f"Schedule({self.kind.value}, {self.start:.4g} -> {self.end:.4g})"
