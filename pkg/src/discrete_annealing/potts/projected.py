"""Projected and folded mean-field Potts chains.

The magnetization vector m = M(sigma) counts the sites of each color; folding
sorts it into non-increasing order. The projected block Glauber kernel is
computed combinatorially: from a configuration with magnetization m, a block
of color composition x is chosen with probability prod_a C(m_a, x_a) /
C(n, q-1), and its new composition y with probability proportional to the
number of block colorings C(q-1; y) times the per-configuration weight
w(m - x + y) = exp((beta / n) sum_a (m - x + y)_a^2).
"""

from __future__ import annotations

import itertools
import logging
import math
from functools import cached_property, lru_cache

import numpy as np
from scipy.special import gammaln, logsumexp, softmax

from discrete_annealing.errors import TooLarge
from discrete_annealing.graph.measures import Capacity, ProbVector
from discrete_annealing.graph.state_graph import StateGraph
from discrete_annealing.ising.projected import ProjectedIsingChain
from discrete_annealing.markov.kernel import RateKernel, capacity_from_kernel

logger = logging.getLogger(__name__)

MAX_PROJECTED_STATES = 5_000

MagnetizationVector = tuple[int, ...]


def compositions(n: int, q: int) -> np.ndarray:
    """All length-q nonnegative integer vectors summing to n, lexicographically ascending."""
    rows = []
    for bars in itertools.combinations(range(n + q - 1), q - 1):
        cuts = (-1, *bars, n + q - 1)
        rows.append([cuts[i + 1] - cuts[i] - 1 for i in range(q)])
    return np.array(rows, dtype=np.int64).reshape(-1, q)


def is_sorted(m: np.ndarray) -> np.ndarray:
    """Row mask of non-increasing vectors."""
    m = np.atleast_2d(m)
    return np.all(m[:, :-1] >= m[:, 1:], axis=1)


def log_multinomial(n: int, m: np.ndarray) -> np.ndarray:
    """log n! / prod_a m_a!, row-wise."""
    return gammaln(n + 1) - gammaln(np.asarray(m) + 1).sum(axis=-1)


def fold_multiplicity(m: np.ndarray) -> np.ndarray:
    """Number of distinct color permutations of m: q! over prod of (value multiplicity)!."""
    m = np.atleast_2d(m)
    q = m.shape[1]
    out = np.empty(m.shape[0], dtype=np.int64)
    for i, row in enumerate(m):
        _, counts = np.unique(row, return_counts=True)
        out[i] = math.factorial(q) // math.prod(math.factorial(int(c)) for c in counts)
    return out


def log_projected_weight(n: int, q: int, beta: float, m: np.ndarray) -> np.ndarray:
    """Unnormalized log pi_bar(m) = log C(n; m) + (beta / n) sum_a m_a^2."""
    m = np.atleast_2d(np.asarray(m, dtype=np.int64))
    if m.shape[1] != q or np.any(m.sum(axis=1) != n):
        raise ValueError(f"Magnetization vectors must have {q} entries summing to {n}")
    return log_multinomial(n, m) + beta / n * (m.astype(float) ** 2).sum(axis=1)


def log_partition(n: int, q: int, beta: float) -> float:
    """log of sum_sigma exp((beta / n) sum_a M_a(sigma)^2)."""
    return float(logsumexp(log_projected_weight(n, q, beta, compositions(n, q))))


def projected_size(n: int, q: int) -> int:
    """|Omega_bar| = C(n + q - 1, q - 1)."""
    return math.comb(n + q - 1, q - 1)


def size_bound(n: int, q: int) -> float:
    """(2n)^q / (q - 1)!, an upper bound on the projected space size."""
    return (2.0 * n) ** q / math.factorial(q - 1)


# ---------------------------------------------------------------------------
# Block moves
# ---------------------------------------------------------------------------


class CompositionMoves:
    """Block-resampling moves of the projected chain, independent of beta.

    Row k of ``targets`` lists, for source state ``src[k]`` and removed block
    composition x_k, the state reached by each new block composition y.
    ``log_choose[k]`` is log(prod_a C(m_a, x_a) / C(n, q-1)).
    """

    def __init__(self, n: int, q: int, folded: bool) -> None:
        if n < 1 or q < 2:
            raise ValueError(f"Projected Potts chain needs n >= 1 and q >= 2, got n={n}, q={q}")
        if n < q - 1:
            raise ValueError(f"Block moves need n >= q - 1 sites, got n={n}, q={q}")
        if projected_size(n, q) > MAX_PROJECTED_STATES:
            raise TooLarge(
                f"Projected Potts space C({n + q - 1}, {q - 1}) exceeds {MAX_PROJECTED_STATES}"
            )
        self.n, self.q, self.folded = n, q, folded
        states = compositions(n, q)
        if folded:
            states = states[is_sorted(states)]
        self.states = states
        index = {tuple(row): i for i, row in enumerate(states.tolist())}

        def locate(m: np.ndarray) -> int:
            key = tuple(sorted(m.tolist(), reverse=True)) if folded else tuple(m.tolist())
            return index[key]

        blocks = compositions(q - 1, q)
        self.log_colorings = log_multinomial(q - 1, blocks)
        log_blocks = math.log(math.comb(n, q - 1))
        src, log_choose, targets = [], [], []
        for i, m in enumerate(states):
            for x in blocks:
                if np.any(x > m):
                    continue
                rest = m - x
                src.append(i)
                log_choose.append(
                    float(
                        (gammaln(m + 1) - gammaln(x + 1) - gammaln(rest + 1)).sum() - log_blocks
                    )
                )
                targets.append([locate(rest + y) for y in blocks])
        self.src = np.array(src, dtype=np.int64)
        self.log_choose = np.array(log_choose)
        self.targets = np.array(targets, dtype=np.int64)

        support = np.zeros((len(states), len(states)), dtype=bool)
        support[self.src[:, None], self.targets] = True
        labels = [tuple(row) for row in states.tolist()]
        self.graph = StateGraph.from_support(labels, support)
        logger.debug(
            "projected potts moves n=%d q=%d folded=%s: %d states, %d edges",
            n,
            q,
            folded,
            self.graph.size,
            self.graph.num_edges,
        )

    def kernel(self, log_weight: np.ndarray) -> RateKernel:
        """Lumped block Glauber kernel for per-configuration log weights on the states."""
        log_weight = np.asarray(log_weight, dtype=float)
        logits = log_weight[self.targets] + self.log_colorings[None, :]
        probs = softmax(logits, axis=1) * np.exp(self.log_choose)[:, None]
        size = self.graph.size
        off = np.zeros((size, size))
        rows = np.broadcast_to(self.src[:, None], self.targets.shape)
        np.add.at(off, (rows, self.targets), probs)
        return RateKernel.from_off_diagonal(self.graph, off)


@lru_cache(maxsize=16)
def composition_moves(n: int, q: int, folded: bool = False) -> CompositionMoves:
    return CompositionMoves(n, q, folded)


# ---------------------------------------------------------------------------
# Chains
# ---------------------------------------------------------------------------


class ProjectedPottsChain:
    """Block Glauber chain of the magnetization vector, optionally sorted."""

    def __init__(self, n: int, q: int, beta: float, folded: bool = False) -> None:
        if beta < 0.0:
            raise ValueError(f"beta must be nonnegative, got {beta}")
        self.n, self.q = n, q
        self.beta = float(beta)
        self.folded = folded
        self.moves = composition_moves(n, q, folded)
        self.states = self.moves.states
        self.graph = self.moves.graph

    # ------------------------------------------------------------------
    # Measure
    # ------------------------------------------------------------------

    def base_log_weight(self) -> np.ndarray:
        """log C(n; m), plus log r(m) when folded."""
        base = log_multinomial(self.n, self.states)
        if self.folded:
            base = base + np.log(fold_multiplicity(self.states))
        return base

    def statistic(self) -> np.ndarray:
        """sum_a m_a^2 / n."""
        return (self.states.astype(float) ** 2).sum(axis=1) / self.n

    @cached_property
    def log_measure(self) -> np.ndarray:
        logits = self.base_log_weight() + self.beta * self.statistic()
        return logits - logsumexp(logits)

    @cached_property
    def measure(self) -> ProbVector:
        return ProbVector.from_log_weights(self.log_measure)

    # ------------------------------------------------------------------
    # Dynamics
    # ------------------------------------------------------------------

    @cached_property
    def kernel(self) -> RateKernel:
        return self.moves.kernel(self.beta * self.statistic())

    @cached_property
    def capacity(self) -> Capacity:
        return capacity_from_kernel(self.kernel, self.measure)

    # ------------------------------------------------------------------
    # Bounds
    # ------------------------------------------------------------------

    def capacity_lower_bound(self) -> np.ndarray:
        """pi pi' / n^(2q-2) per edge; min(pi, pi')^2 / ((q!)^2 n^(2q-2)) when folded."""
        pi = self.measure.values
        a, b = pi[self.graph.edges[:, 0]], pi[self.graph.edges[:, 1]]
        scale = float(self.n) ** (2 * self.q - 2)
        if self.folded:
            return np.minimum(a, b) ** 2 / (math.factorial(self.q) ** 2 * scale)
        return a * b / scale

    def capacity_bound_slack(self) -> float:
        """min over edges of c / lower bound; at least 1 when the bound holds."""
        if self.graph.num_edges == 0:
            return float("inf")
        return float(np.min(self.capacity.weights / self.capacity_lower_bound()))

    def index_of(self, m: MagnetizationVector) -> int:
        return self.graph.index_of(tuple(int(v) for v in m))

    def __repr__(self) -> str:
        kind = "folded" if self.folded else "projected"
        return f"ProjectedPottsChain(n={self.n}, q={self.q}, beta={self.beta}, {kind})"


def projected_potts_chain(
    n: int, q: int, beta: float, folded: bool = False
) -> ProjectedPottsChain:
    return ProjectedPottsChain(n, q, beta, folded)


# ---------------------------------------------------------------------------
# Landscape
# ---------------------------------------------------------------------------


def diagonal_point(n: int, q: int, k: int) -> MagnetizationVector:
    """(n - (q-1) k, k, ..., k)."""
    return (n - (q - 1) * k,) + (k,) * (q - 1)


def diagonal_profile(n: int, q: int, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """(k, log pi_bar(n - (q-1) k, k, ..., k)) for 0 <= k <= n / q."""
    ks = np.arange(n // q + 1)
    points = np.array([diagonal_point(n, q, int(k)) for k in ks], dtype=np.int64)
    log_p = log_projected_weight(n, q, beta, points) - log_partition(n, q, beta)
    return ks, log_p


def potts_as_ising_gap(n: int, q: int, beta: float) -> float:
    """Largest deviation between a two-color conditional of pi_bar and the projected Ising law.

    Fixing every count except m_a and m_b leaves N = m_a + m_b sites whose law of
    m_a - m_b is the projected Ising measure with N sites at beta N / n.
    """
    chain = ProjectedPottsChain(n, q, beta)
    states, log_p = chain.states, chain.log_measure
    ising: dict[int, ProjectedIsingChain] = {}
    worst = 0.0
    for a, b in itertools.combinations(range(q), 2):
        rest = np.delete(states, [a, b], axis=1)
        groups: dict[tuple[int, ...], list[int]] = {}
        for i, key in enumerate(map(tuple, rest.tolist())):
            groups.setdefault(key, []).append(i)
        for members in groups.values():
            idx = np.array(members)
            size = int(states[idx[0], a] + states[idx[0], b])
            if size == 0:
                continue
            if size not in ising:
                ising[size] = ProjectedIsingChain(size, beta * size / n)
            conditional = softmax(log_p[idx])
            spins = states[idx, a] - states[idx, b]
            reference = ising[size].measure.values[(spins + size) // 2]
            worst = max(worst, float(np.max(np.abs(conditional - reference))))
    return worst
