"""Poincare and modified log-Sobolev constants, canonical paths, speed bounds.

The Poincare constant is exact: one over the spectral gap of the capacity
Laplacian against the diagonal mass matrix of pi, solved as a symmetric
eigenproblem after the similarity transform D^{-1/2} L D^{-1/2}. The modified
log-Sobolev constant has no closed form; on spaces with at most four states it
is certified on a dense simplex grid, elsewhere only a hill-climbing lower
bound is available.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterator, Mapping, Sequence

import numpy as np
import scipy.linalg

from discrete_annealing.errors import BrokenPath, DisconnectedCapacity, TooLargeForGrid
from discrete_annealing.graph.analysis import CapacityAnalyzer
from discrete_annealing.graph.measures import MassRate
from discrete_annealing.markov.kernel import ReversiblePair
from discrete_annealing.models import MlsiEstimate, MlsiMode
from discrete_annealing.transport.potential import metric_derivative_sq

logger = logging.getLogger(__name__)

GRID_MAX_STATES = 4
DEFAULT_RESOLUTION = 400


# ---------------------------------------------------------------------------
# Poincare
# ---------------------------------------------------------------------------


def spectral_gap(pair: ReversiblePair) -> float:
    """Smallest nonzero eigenvalue of -L^p in L^2(pi)."""
    analyzer = CapacityAnalyzer(pair.capacity)
    if not analyzer.is_connected():
        raise DisconnectedCapacity("Spectral gap of a disconnected chain is zero")
    if pair.graph.size == 1:
        return float("inf")
    scale = 1.0 / np.sqrt(pair.stationary.values)
    sym = analyzer.laplacian() * scale[:, None] * scale[None, :]
    eigenvalues = scipy.linalg.eigh(sym, eigvals_only=True, subset_by_index=[0, 1])
    return float(eigenvalues[1])


def poincare_constant(pair: ReversiblePair) -> float:
    """Optimal C_PI with Var_pi[f] <= C_PI * E(f, f)."""
    gap = spectral_gap(pair)
    return 0.0 if np.isinf(gap) else 1.0 / gap


# ---------------------------------------------------------------------------
# Modified log-Sobolev
# ---------------------------------------------------------------------------


def _mlsi_ratios(pair: ReversiblePair, f: np.ndarray) -> np.ndarray:
    """Ent_pi[f] / E(log f, f) for each row of ``f``; NaN where E vanishes."""
    pi = pair.stationary.values
    edges = pair.graph.edges
    w = pair.capacity.weights
    logf = np.log(f)
    mean = f @ pi
    ent = (f * logf) @ pi - mean * np.log(mean)
    dlog = logf[:, edges[:, 1]] - logf[:, edges[:, 0]]
    df = f[:, edges[:, 1]] - f[:, edges[:, 0]]
    energy = (dlog * df) @ w
    out = np.full(f.shape[0], np.nan)
    live = energy > 1e-300
    out[live] = ent[live] / energy[live]
    return out


def _simplex_points(size: int, resolution: int) -> Iterator[np.ndarray]:
    """Integer compositions of ``resolution`` into ``size`` positive parts, in chunks."""
    if size == 1:
        yield np.array([[resolution]])
        return
    if size == 2:
        a = np.arange(1, resolution)
        yield np.column_stack([a, resolution - a])
        return
    lead = size - 3
    for prefix in itertools.product(range(1, resolution), repeat=lead):
        rem = resolution - sum(prefix)
        if rem < 3:
            continue
        b, c = np.meshgrid(np.arange(1, rem - 1), np.arange(1, rem - 1), indexing="ij")
        keep = b + c <= rem - 1
        b, c = b[keep], c[keep]
        head = np.broadcast_to(np.array(prefix, dtype=int), (b.size, lead))
        yield np.column_stack([head, b, c, rem - b - c])


def _grid_supremum(pair: ReversiblePair, resolution: int) -> float:
    best = 0.0
    for chunk in _simplex_points(pair.graph.size, resolution):
        ratios = _mlsi_ratios(pair, chunk / resolution)
        if np.any(np.isfinite(ratios)):
            best = max(best, float(np.nanmax(ratios)))
    return best


def _ascent(pair: ReversiblePair, restarts: int, iterations: int, seed: int) -> float:
    rng = np.random.default_rng(seed)
    size = pair.graph.size
    best = 0.0
    for _ in range(restarts):
        g = rng.normal(size=size)
        current = _mlsi_ratios(pair, np.exp(g)[None, :])[0]
        sigma = 0.5
        rejected = 0
        for _ in range(iterations):
            proposal = g + sigma * rng.normal(size=size)
            value = _mlsi_ratios(pair, np.exp(proposal)[None, :])[0]
            if np.isfinite(value) and (not np.isfinite(current) or value > current):
                g, current = proposal, value
                rejected = 0
            else:
                rejected += 1
                if rejected >= 50:
                    sigma *= 0.5
                    rejected = 0
        if np.isfinite(current):
            best = max(best, float(current))
    return best


def mlsi_constant(
    pair: ReversiblePair,
    mode: MlsiMode = MlsiMode.EXACT_GRID,
    resolution: int = DEFAULT_RESOLUTION,
    restarts: int = 20,
    iterations: int = 2000,
    seed: int = 0,
) -> MlsiEstimate:
    """C_MLSI with Ent_pi[f] <= C_MLSI * E(log f, f).

    ``exact-grid`` scans f = k / resolution over positive integer compositions
    (constant f excluded) and reports the change from halving the resolution as
    its error. ``ascent`` is multiplicative hill climbing and only a lower bound.
    """
    if mode == MlsiMode.EXACT_GRID:
        if pair.graph.size > GRID_MAX_STATES:
            raise TooLargeForGrid(
                f"Grid certification needs at most {GRID_MAX_STATES} states, got {pair.graph.size}"
            )
        fine = _grid_supremum(pair, resolution)
        coarse = _grid_supremum(pair, max(pair.graph.size + 1, resolution // 2))
        logger.debug("mlsi grid: R=%d -> %.6g, R/2 -> %.6g", resolution, fine, coarse)
        return MlsiEstimate(
            value=fine, error=abs(fine - coarse), mode=mode, resolution=resolution
        )
    value = _ascent(pair, restarts, iterations, seed)
    return MlsiEstimate(value=value, error=0.0, mode=mode)


# ---------------------------------------------------------------------------
# Canonical paths
# ---------------------------------------------------------------------------


def _route_edges(pair: ReversiblePair, x: int, y: int, path: Sequence[int]) -> list[int]:
    if len(path) < 2 or {path[0], path[-1]} != {x, y}:
        raise BrokenPath(f"Path for ({x}, {y}) does not join its endpoints")
    if len(set(path)) != len(path):
        raise BrokenPath(f"Path for ({x}, {y}) revisits a state")
    graph = pair.graph
    eids: list[int] = []
    for a, b in itertools.pairwise(path):
        if not graph.has_edge(a, b) or pair.capacity.value(a, b) <= 0.0:
            raise BrokenPath(f"Path for ({x}, {y}) uses non-edge ({a}, {b})")
        eids.append(graph.edge_id(a, b))
    return eids


def canonical_paths_congestion(
    pair: ReversiblePair, paths: Mapping[tuple[int, int], Sequence[int]]
) -> float:
    """max_e (1 / c(e)) * sum_{pairs through e} |gamma_xy| pi(x) pi(y).

    ``paths`` must route every unordered pair x < y; its value is an upper
    bound on C_PI.
    """
    size = pair.graph.size
    routed = {(min(k), max(k)): v for k, v in paths.items()}
    pi = pair.stationary.values
    load = np.zeros(pair.graph.num_edges)
    for x in range(size):
        for y in range(x + 1, size):
            if (x, y) not in routed:
                raise BrokenPath(f"No path routes the pair ({x}, {y})")
            eids = _route_edges(pair, x, y, routed[(x, y)])
            np.add.at(load, eids, len(eids) * pi[x] * pi[y])
    used = load > 0.0
    if not np.any(used):
        return 0.0
    return float(np.max(load[used] / pair.capacity.weights[used]))


# ---------------------------------------------------------------------------
# Speed bounds
# ---------------------------------------------------------------------------


def gibbs_speed_bound(
    pair: ReversiblePair, rate: MassRate, mlsi: float | None = None
) -> tuple[float, float]:
    """Squared metric derivative at pi and its functional-inequality bound.

    The bound is C_PI * ||d log pi||^2_{L^2(pi)}, or 2 C_MLSI times the same
    norm when ``mlsi`` is given.
    """
    speed, _ = metric_derivative_sq(pair.graph, pair.capacity, rate, pair.stationary)
    log_rate_sq = float(np.sum(rate.values**2 / pair.stationary.values))
    factor = 2.0 * mlsi if mlsi is not None else poincare_constant(pair)
    return speed, factor * log_rate_sq
