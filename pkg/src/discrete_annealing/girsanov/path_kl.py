"""KL divergence between path measures of two jump chains.

For chains with rate kernels p_t and q_t on a shared graph, started at mu_0 and
nu_0, the path-space divergence is

    KL(mu_0 || nu_0) + int_0^T sum_x mu_t(x) sum_{y != x} [p log(p / q) - (p - q)] dt

where mu_t is the marginal of the p-chain. :func:`discrete_path_kl` is the
chain-rule KL of the Euler-discretized pair P = I + dt p, which converges to
the continuous value at first order in dt.
"""

from __future__ import annotations

import logging
from collections.abc import Callable

import numpy as np
from numpy.typing import ArrayLike
from scipy.integrate import simpson
from scipy.special import xlogy

from discrete_annealing.errors import (
    InvalidKernel,
    NegativeRate,
    RateCapExceeded,
    SupportMismatch,
)
from discrete_annealing.graph.measures import ProbVector
from discrete_annealing.markov.kernel import RateKernel

logger = logging.getLogger(__name__)

RATE_CAP = 1e6

KernelFn = Callable[[float], RateKernel]
MeasureFn = Callable[[float], ProbVector]


def psi(r: float | ArrayLike) -> float | np.ndarray:
    """r log r - r + 1 (equal to 1 at r = 0)."""
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0.0):
        raise NegativeRate(f"psi is defined for r >= 0, got {r!r}")
    out = xlogy(arr, arr) - arr + 1.0
    return float(out) if out.ndim == 0 else out


def edge_kl_cost(rho: float | ArrayLike) -> float | np.ndarray:
    """rho asinh(rho / 2) - 2 sqrt(1 + rho^2 / 4) + 2.

    Evaluated as 2u (asinh(u) - u / (1 + sqrt(1 + u^2))) with u = |rho| / 2,
    which is free of cancellation for small rho. Even in rho and at most rho^2 / 4.
    """
    u = np.abs(np.asarray(rho, dtype=float)) / 2.0
    out = 2.0 * u * (np.arcsinh(u) - u / (1.0 + np.sqrt(1.0 + u * u)))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Continuous time
# ---------------------------------------------------------------------------


def _off_diagonal(kernel: RateKernel) -> np.ndarray:
    off = np.array(kernel.rates)
    np.fill_diagonal(off, 0.0)
    return off


def kl_rate(p: RateKernel, q: RateKernel, mu: ProbVector, rate_cap: float = RATE_CAP) -> float:
    """Instantaneous path-KL density sum_x mu(x) sum_y [p log(p/q) - (p - q)]."""
    if p.size != q.size:
        raise InvalidKernel("Kernels live on different state spaces")
    pr, qr = _off_diagonal(p), _off_diagonal(q)
    top = max(float(pr.max(initial=0.0)), float(qr.max(initial=0.0)))
    if top > rate_cap:
        raise RateCapExceeded(f"Rate {top:.3e} exceeds the cap {rate_cap:.3e}")
    mismatch = (pr > 0.0) & (qr == 0.0)
    if np.any(mismatch):
        x, y = np.argwhere(mismatch)[0]
        raise SupportMismatch(f"p({x}, {y}) > 0 where the reference rate vanishes")
    terms = xlogy(pr, pr) - xlogy(pr, np.where(qr > 0.0, qr, 1.0)) - (pr - qr)
    return float(mu.values @ terms.sum(axis=1))


def path_kl_with_error(
    p_sched: KernelFn,
    q_sched: KernelFn,
    mu_sched: MeasureFn,
    init_kl: float,
    horizon: float,
    grid: ArrayLike | int = 201,
    rate_cap: float = RATE_CAP,
) -> tuple[float, float]:
    """Path KL by composite Simpson and its grid-halving error estimate."""
    nodes = np.linspace(0.0, horizon, grid) if isinstance(grid, int) else np.asarray(grid, float)
    if horizon == 0.0:
        return float(init_kl), 0.0
    density = np.array(
        [kl_rate(p_sched(t), q_sched(t), mu_sched(t), rate_cap) for t in nodes]
    )
    integral = float(simpson(density, x=nodes))
    error = 0.0
    if nodes.size >= 5:
        error = abs(integral - float(simpson(density[::2], x=nodes[::2])))
        if nodes.size % 2 == 1:
            error /= 15.0
    logger.debug("path kl integral=%.6e error=%.2e", integral, error)
    return float(init_kl) + max(integral, 0.0), error


def path_kl(
    p_sched: KernelFn,
    q_sched: KernelFn,
    mu_sched: MeasureFn,
    init_kl: float,
    horizon: float,
    grid: ArrayLike | int = 201,
    rate_cap: float = RATE_CAP,
) -> float:
    """KL(P || Q) between the path measures of the p-chain and the q-chain."""
    value, _ = path_kl_with_error(p_sched, q_sched, mu_sched, init_kl, horizon, grid, rate_cap)
    return value


# ---------------------------------------------------------------------------
# Discrete-time oracle
# ---------------------------------------------------------------------------


def discrete_path_kl(
    p_sched: KernelFn,
    q_sched: KernelFn,
    mu0: ProbVector,
    init_kl: float,
    horizon: float,
    steps: int,
) -> float:
    """Chain-rule KL of the Euler chains P_k = I + dt p(t_k), Q_k = I + dt q(t_k).

    sum_k E_{mu_k} KL(P_k(x, .) || Q_k(x, .)) with mu_{k+1} = mu_k P_k and t_k = k dt.
    """
    dt = horizon / steps
    mu = mu0.values.copy()
    total = float(init_kl)
    for k in range(steps):
        t = k * dt
        P = np.eye(mu.size) + dt * p_sched(t).rates
        Q = np.eye(mu.size) + dt * q_sched(t).rates
        if np.any(P < 0.0) or np.any(Q < 0.0):
            raise InvalidKernel(f"Step {dt:.3g} is too coarse for the Euler chain")
        if np.any((P > 0.0) & (Q == 0.0)):
            raise SupportMismatch("Euler chain of p leaves the support of q")
        rows = xlogy(P, P).sum(axis=1) - xlogy(P, np.where(Q > 0.0, Q, 1.0)).sum(axis=1)
        total += float(mu @ rows)
        mu = mu @ P
    return total
