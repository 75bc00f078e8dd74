"""Shape of the projected Ising measure and its log-derivative.

On nonnegative magnetizations the projected measure is decreasing at high
temperature (beta <= 1 - 1/n), stays within a factor e of its value at the
smallest magnetization in the critical window 1 - 1/n < beta < 1, and for
beta >= 1 peaks beyond n * sqrt(1 - 1/beta).
"""

from __future__ import annotations

import logging
import math

import numpy as np

from discrete_annealing.ising.projected import ProjectedIsingChain
from discrete_annealing.models import LandscapeReport, LandscapeShape

logger = logging.getLogger(__name__)

FLAT_TOL = 1e-12


def classify_profile(log_values: np.ndarray, tol: float = FLAT_TOL) -> LandscapeShape:
    """Shape of a sequence from the signs of its consecutive log-ratios."""
    steps = np.diff(np.asarray(log_values, dtype=float))
    if steps.size == 0 or np.all(np.abs(steps) <= tol):
        return LandscapeShape.CONSTANT
    up, down = steps > tol, steps < -tol
    if not np.any(down):
        return LandscapeShape.INCREASING
    if not np.any(up):
        return LandscapeShape.DECREASING
    last_up = int(np.flatnonzero(up)[-1])
    first_down = int(np.flatnonzero(down)[0])
    return LandscapeShape.UNIMODAL if last_up < first_down else LandscapeShape.OTHER


def landscape_profile(
    n: int, beta: float, nonnegative: bool = True
) -> tuple[np.ndarray, np.ndarray]:
    """(m, log pi_bar(m)) on the magnetization chain, by default only for m >= 0."""
    chain = ProjectedIsingChain(n, beta)
    if not nonnegative:
        return chain.m, chain.log_measure
    keep = chain.m >= 0
    return chain.m[keep], chain.log_measure[keep]


def landscape_classify(n: int, beta: float) -> LandscapeReport:
    """Classify {pi_bar(m)}_{m >= 0} and check the regime-specific bounds."""
    m, log_p = landscape_profile(n, beta)
    shape = classify_profile(log_p)
    mode = int(m[int(np.argmax(log_p))])

    mode_bound = mode_bound_holds = None
    if beta >= 1.0:
        mode_bound = n * math.sqrt(1.0 - 1.0 / beta)
        mode_bound_holds = mode > mode_bound

    must_decrease = beta <= 1.0 - 1.0 / n and m.size >= 2

    middle_bound_holds = None
    if 1.0 - 1.0 / n < beta < 1.0:
        # m[0] is 0 or 1 by parity
        middle_bound_holds = bool(np.all(log_p[1:] < 1.0 + log_p[0]))

    report = LandscapeReport(
        n=n,
        beta=beta,
        shape=shape,
        mode=mode,
        mode_bound=mode_bound,
        mode_bound_holds=mode_bound_holds,
        must_decrease=must_decrease,
        middle_bound_holds=middle_bound_holds,
    )
    if not report.consistent:
        logger.warning("landscape at n=%d beta=%.4g is %s", n, beta, shape.value)
    return report


def dlog_folded_measure(n: int, beta: float, beta_prime: float) -> np.ndarray:
    """d/ds log pi_bar_bar_s on the folded states.

    Equals (beta' / 2n) (m^2 - E[m^2]) under the folded measure at beta.
    """
    chain = ProjectedIsingChain(n, beta, folded=True)
    m2 = chain.m.astype(float) ** 2
    return beta_prime / (2.0 * n) * (m2 - chain.measure.expectation(m2))


def dlog_norm_bound(n: int, beta_prime: float) -> float:
    """Upper bound (beta')^2 n^2 / 16 on the L^2 norm squared of the log-derivative."""
    return beta_prime**2 * n**2 / 16.0
