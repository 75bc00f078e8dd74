"""The reference chain whose marginals follow a prescribed curve.

Given a reversible kernel p with capacity c = pi p and a flux J with ratio
rho = J / c on each edge, the kernel

    q(x, y) = p(x, y) (sqrt(1 + rho^2/4) + rho/2)
    q(y, x) = p(y, x) (sqrt(1 + rho^2/4) - rho/2)

moves mass at net rate J along every edge while minimizing the path KL to p.
Driving q with the optimal flux of a curve reproduces the curve's marginals,
and its path KL to the p-chain is at most KL_0 + action / 4.
"""

from __future__ import annotations

import logging
from collections.abc import Callable

import numpy as np
from numpy.typing import ArrayLike
from scipy.integrate import solve_ivp

from discrete_annealing.errors import IntegrationFailed, InvalidGraph, ZeroCapacityEdge
from discrete_annealing.girsanov.path_kl import RATE_CAP, path_kl_with_error
from discrete_annealing.graph.measures import Capacity, Flux, ProbVector
from discrete_annealing.markov.kernel import RateKernel
from discrete_annealing.transport.action import CurveSpec
from discrete_annealing.transport.potential import metric_derivative_sq

logger = logging.getLogger(__name__)


def reference_multipliers(rho: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    """Forward and backward multipliers sqrt(1 + u^2) +- u with u = rho / 2.

    Their difference is exactly rho and their product is one; the smaller one is
    taken as the reciprocal of the larger to avoid cancellation.
    """
    u = np.asarray(rho, dtype=float) / 2.0
    root = np.sqrt(1.0 + u * u)
    big = root + np.abs(u)
    small = 1.0 / big
    forward = np.where(u >= 0.0, big, small)
    backward = np.where(u >= 0.0, small, big)
    return forward, backward


def reference_kernel(p: RateKernel, capacity: Capacity, flux: Flux) -> RateKernel:
    """KL-optimal kernel carrying ``flux`` on top of ``p``."""
    graph = p.graph
    if capacity.graph.num_edges != graph.num_edges or flux.graph.num_edges != graph.num_edges:
        raise InvalidGraph("Kernel, capacity and flux must share one edge set")
    c = capacity.weights
    j = flux.values
    dead = c == 0.0
    if np.any(j[dead] != 0.0):
        k = int(np.flatnonzero(dead & (j != 0.0))[0])
        x, y = graph.edges[k]
        raise ZeroCapacityEdge(f"Flux {j[k]!r} on zero-capacity edge ({x}, {y})")
    rho = np.zeros_like(c)
    rho[~dead] = j[~dead] / c[~dead]
    forward, backward = reference_multipliers(rho)
    fwd, bwd = p.edge_rates()
    return RateKernel.from_edge_rates(graph, fwd * forward, bwd * backward)


class ReferenceChain:
    """Time-varying reference kernels q*_s built from a curve's optimal flux.

    ``kernel_of(s)`` returns the annealing kernel p_s, reversible with respect
    to ``curve.measure(s)``; the curve's capacity must be pi_s p_s.
    """

    def __init__(self, curve: CurveSpec, kernel_of: Callable[[float], RateKernel]) -> None:
        self.curve = curve
        self.kernel_of = kernel_of

    def kernel(self, s: float) -> RateKernel:
        capacity = self.curve.capacity(s)
        _, flux = metric_derivative_sq(
            self.curve.graph, capacity, self.curve.mass_rate(s), self.curve.measure(s)
        )
        return reference_kernel(self.kernel_of(s), capacity, flux)

    def marginals(
        self, checkpoints: ArrayLike, rtol: float = 1e-10, atol: float = 1e-13
    ) -> list[ProbVector]:
        """Solve d/ds mu = mu q*_s from mu_0 = pi_0 and report mu at ``checkpoints``."""
        times = np.asarray(checkpoints, dtype=float)
        mu0 = self.curve.measure(0.0).values

        def rhs(s: float, mu: np.ndarray) -> np.ndarray:
            return mu @ self.kernel(float(np.clip(s, 0.0, self.curve.horizon))).rates

        sol = solve_ivp(
            rhs,
            (0.0, float(times.max())),
            mu0,
            method="DOP853",
            t_eval=times,
            rtol=rtol,
            atol=atol,
        )
        if not sol.success:
            raise IntegrationFailed(f"Reference-chain integration failed: {sol.message}")
        out = []
        for column in sol.y.T:
            floored = np.maximum(column, np.finfo(float).tiny)
            out.append(ProbVector(floored / floored.sum()))
        return out

    def path_kl_to_annealing(
        self, init_kl: float = 0.0, rate_cap: float = RATE_CAP
    ) -> tuple[float, float]:
        """KL(reference path || annealing path) and its quadrature error.

        The reference chain's marginal at s is pi_s, so the curve's measure
        evaluator serves as the marginal schedule.
        """
        return path_kl_with_error(
            self.kernel,
            self.kernel_of,
            self.curve.measure,
            init_kl,
            self.curve.horizon,
            self.curve.grid,
            rate_cap,
        )
