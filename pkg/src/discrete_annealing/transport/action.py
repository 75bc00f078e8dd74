"""Curves of measures and their action.

A :class:`CurveSpec` bundles a parameter grid with evaluators for the measure,
the mass rate and the capacity along the curve. :func:`action` integrates the
squared metric derivative over the grid with composite Simpson and estimates
the quadrature error by halving the grid.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike
from scipy.integrate import simpson

from discrete_annealing.errors import AnnealingError, InvalidMassRate
from discrete_annealing.graph.measures import Capacity, MassRate, ProbVector
from discrete_annealing.graph.state_graph import StateGraph
from discrete_annealing.models import ActionReport, QuadratureRule
from discrete_annealing.transport.potential import metric_derivative_sq

logger = logging.getLogger(__name__)

DEFAULT_NODES = 201
FD_STEP = 1e-5

MeasureFn = Callable[[float], ProbVector]
RateFn = Callable[[float], MassRate]
CapacityFn = Callable[[float], Capacity]


class CurveSpec:
    """A curve s -> pi_s on [0, horizon] with its capacities.

    Without an analytic ``rate`` the mass rate is a central finite difference of
    the measure with step ``fd_step`` (one-sided at the interval ends). With an
    analytic rate, :meth:`check_consistency` compares the two.
    """

    def __init__(
        self,
        graph: StateGraph,
        measure: MeasureFn,
        capacity: CapacityFn,
        rate: RateFn | None = None,
        grid: ArrayLike | int = DEFAULT_NODES,
        horizon: float = 1.0,
        consistency_tol: float | None = 1e-6,
        fd_step: float = FD_STEP,
    ) -> None:
        if horizon <= 0.0:
            raise ValueError(f"Curve horizon must be positive, got {horizon}")
        if isinstance(grid, int):
            if grid < 2:
                raise ValueError("A curve grid needs at least two nodes")
            nodes = np.linspace(0.0, horizon, grid)
        else:
            nodes = np.asarray(grid, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2 or np.any(np.diff(nodes) <= 0.0):
            raise ValueError("Curve grid must be a strictly increasing vector")
        if nodes[0] < 0.0 or nodes[-1] > horizon * (1.0 + 1e-12):
            raise ValueError(f"Curve grid must lie in [0, {horizon}]")
        self.graph = graph
        self.grid = nodes
        self.horizon = float(horizon)
        self.consistency_tol = consistency_tol
        self.fd_step = fd_step * horizon
        self._measure = measure
        self._capacity = capacity
        self._rate = rate

    # ------------------------------------------------------------------
    # Evaluators
    # ------------------------------------------------------------------

    def measure(self, s: float) -> ProbVector:
        return self._measure(s)

    def capacity(self, s: float) -> Capacity:
        return self._capacity(s)

    @property
    def has_analytic_rate(self) -> bool:
        return self._rate is not None

    def finite_difference_rate(self, s: float) -> MassRate:
        h = self.fd_step
        m = self._measure
        if s - h < 0.0:
            diff = -3.0 * m(s).values + 4.0 * m(s + h).values - m(s + 2 * h).values
        elif s + h > self.horizon:
            diff = 3.0 * m(s).values - 4.0 * m(s - h).values + m(s - 2 * h).values
        else:
            diff = m(s + h).values - m(s - h).values
        # all three stencils are second order with denominator 2h
        return MassRate.centered(diff / (2.0 * h))

    def mass_rate(self, s: float) -> MassRate:
        if self._rate is not None:
            return self._rate(s)
        return self.finite_difference_rate(s)

    def check_consistency(self, s: float) -> float:
        """Relative gap between the analytic rate and finite differences at ``s``."""
        analytic = self.mass_rate(s).values
        numeric = self.finite_difference_rate(s).values
        scale = max(1.0, float(np.linalg.norm(analytic)))
        return float(np.linalg.norm(analytic - numeric)) / scale

    # ------------------------------------------------------------------
    # Transformations
    # ------------------------------------------------------------------

    def time_rescaled(self, horizon: float) -> CurveSpec:
        """The same path traversed over [0, horizon]: pi~_t = pi_{t / horizon}."""
        scale = horizon / self.horizon

        def measure(t: float) -> ProbVector:
            return self._measure(t / scale)

        def capacity(t: float) -> Capacity:
            return self._capacity(t / scale)

        rate: RateFn | None = None
        if self._rate is not None:
            inner = self._rate

            def rate(t: float) -> MassRate:
                return MassRate(inner(t / scale).values / scale)

        return CurveSpec(
            self.graph,
            measure,
            capacity,
            rate=rate,
            grid=self.grid * scale,
            horizon=horizon,
            consistency_tol=self.consistency_tol,
            fd_step=self.fd_step / self.horizon,
        )

    def __repr__(self) -> str:
        return (
            f"CurveSpec(states={self.graph.size}, nodes={self.grid.size}, "
            f"horizon={self.horizon})"
        )


def gibbs_curve(
    graph: StateGraph,
    statistic: ArrayLike,
    beta: Callable[[float], float],
    beta_prime: Callable[[float], float],
    capacity_of: Callable[[ProbVector], Capacity],
    base_log_weight: ArrayLike | None = None,
    grid: ArrayLike | int = DEFAULT_NODES,
) -> CurveSpec:
    """Curve pi_s proportional to exp(base + beta(s) * statistic).

    The mass rate is the analytic Gibbs derivative
    beta'(s) * pi_s * (statistic - E_{pi_s}[statistic]); the capacity at s is
    ``capacity_of(pi_s)``.
    """
    h = np.asarray(statistic, dtype=float)
    base = np.zeros_like(h) if base_log_weight is None else np.asarray(base_log_weight, dtype=float)

    @lru_cache(maxsize=8)
    def measure(s: float) -> ProbVector:
        return ProbVector.from_log_weights(base + beta(s) * h)

    def rate(s: float) -> MassRate:
        pi = measure(s).values
        centered = h - float(np.dot(pi, h))
        return MassRate.centered(beta_prime(s) * pi * centered)

    def capacity(s: float) -> Capacity:
        return capacity_of(measure(s))

    return CurveSpec(graph, measure, capacity, rate=rate, grid=grid)


# ---------------------------------------------------------------------------
# Action
# ---------------------------------------------------------------------------


def squared_speed(curve: CurveSpec, s: float) -> float:
    """|pi_dot|_s^2 at one parameter value."""
    value, _ = metric_derivative_sq(
        curve.graph, curve.capacity(s), curve.mass_rate(s), curve.measure(s)
    )
    return value


def _simpson_error(samples: np.ndarray, grid: np.ndarray, fine: float) -> float:
    if samples.size < 5:
        return 0.0
    coarse = float(simpson(samples[::2], x=grid[::2]))
    uniform = np.allclose(np.diff(grid), grid[1] - grid[0], rtol=1e-9)
    if samples.size % 2 == 1 and uniform:
        return abs(fine - coarse) / 15.0
    return abs(fine - coarse)


def action(curve: CurveSpec) -> ActionReport:
    """Integrate the squared metric derivative along ``curve``."""
    samples = np.empty(curve.grid.size)
    for i, s in enumerate(curve.grid):
        try:
            if curve.has_analytic_rate and curve.consistency_tol is not None:
                gap = curve.check_consistency(float(s))
                if gap > curve.consistency_tol:
                    raise InvalidMassRate(
                        f"Analytic mass rate deviates from finite differences by {gap:.3e}"
                    )
            samples[i] = squared_speed(curve, float(s))
        except AnnealingError as exc:
            exc.add_note(f"while evaluating curve node {i} (s={s:.6g})")
            raise
        logger.debug("node %d s=%.6g |pi_dot|^2=%.6e", i, s, samples[i])

    value = float(simpson(samples, x=curve.grid))
    error = _simpson_error(samples, curve.grid, value)
    logger.info("action=%.6e (quadrature error %.2e, %d nodes)", value, error, samples.size)
    return ActionReport(
        value=max(value, 0.0),
        grid=curve.grid.tolist(),
        samples=samples.tolist(),
        rule=QuadratureRule.SIMPSON,
        error=error,
        horizon=curve.horizon,
    )
