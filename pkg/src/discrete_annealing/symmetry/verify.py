"""Symmetry checks for projections and metric-derivative invariance.

When pi is constant on fibers and every state of a fiber sends the same rate
into each other fiber, the projected chain carries the same metric derivative
as the full one. The checks here witness that hypothesis before the
comparison is made.
"""

from __future__ import annotations

import logging

import numpy as np

from discrete_annealing.errors import SymmetryViolation
from discrete_annealing.graph.measures import MassRate, ProbVector
from discrete_annealing.markov.kernel import RateKernel, ReversiblePair
from discrete_annealing.models import ActionReport, MetricDerivativeComparison, SymmetryReport
from discrete_annealing.symmetry.projection import Projection
from discrete_annealing.transport.action import CurveSpec, action
from discrete_annealing.transport.potential import metric_derivative_sq

logger = logging.getLogger(__name__)

SYMMETRY_RTOL = 1e-10
_TINY = np.finfo(float).tiny


def verify_symmetry(
    proj: Projection, pi: ProbVector, kernel: RateKernel, rtol: float = SYMMETRY_RTOL
) -> SymmetryReport:
    """Check that pi is fiber-constant and that Pi_# p(x, .) is fiber-constant."""
    rows = proj.kernel_rows(kernel)
    scale = max(kernel.max_exit_rate, _TINY)
    measure_worst, kernel_worst = 0.0, 0.0
    measure_fiber: str | None = None
    kernel_fiber: str | None = None
    failures: list[str] = []

    for a, fiber in enumerate(proj.fibers):
        label = str(proj.target.label_of(a))
        values = pi.values[fiber]
        m_gap = float(np.max(np.abs(values / values[0] - 1.0)))
        if m_gap > measure_worst:
            measure_worst, measure_fiber = m_gap, label
        k_gap = float(np.max(np.abs(rows[fiber] - rows[fiber[0]]))) / scale
        if k_gap > kernel_worst:
            kernel_worst, kernel_fiber = k_gap, label
        if m_gap > rtol:
            failures.append(f"measure varies by {m_gap:.3e} on fiber {label}")
        if k_gap > rtol:
            failures.append(f"projected rates vary by {k_gap:.3e} on fiber {label}")

    if failures:
        logger.debug("symmetry check failed on %d fibers of %r", len(failures), proj)
    return SymmetryReport(
        passed=not failures,
        measure_violation=measure_worst,
        measure_fiber=measure_fiber,
        kernel_violation=kernel_worst,
        kernel_fiber=kernel_fiber,
        failures=failures,
    )


def compare_metric_derivative(
    proj: Projection,
    full: ReversiblePair,
    projected: ReversiblePair,
    rate: MassRate,
) -> MetricDerivativeComparison:
    """|pi_dot|^2 on the full space against the projected space.

    The projected instance receives the pushed-forward mass rate. Raises
    :class:`SymmetryViolation` unless the projection preserves the symmetry of
    ``full``.
    """
    report = verify_symmetry(proj, full.stationary, full.kernel)
    if not report.passed:
        raise SymmetryViolation(
            f"{proj!r} does not preserve the chain's symmetry: {report.failures[0]}"
        )
    if projected.graph.states != proj.target.states:
        raise SymmetryViolation("Projected instance does not live on the projected graph")
    value_full, _ = metric_derivative_sq(full.graph, full.capacity, rate, full.stationary)
    value_proj, _ = metric_derivative_sq(
        projected.graph, projected.capacity, proj.project_rate(rate), projected.stationary
    )
    gap = abs(value_full - value_proj) / max(value_full, _TINY)
    return MetricDerivativeComparison(full=value_full, projected=value_proj, gap=gap)


def compare_actions(proj: Projection, curve: CurveSpec) -> tuple[ActionReport, ActionReport]:
    """Action of ``curve`` and of its pushforward under ``proj``."""
    full = action(curve)
    projected = action(proj.push_curve(curve))
    logger.info("action full=%.10g projected=%.10g", full.value, projected.value)
    return full, projected
