"""Paths to the mode on the folded Potts space.

From any sorted magnetization vector m the construction reaches the diagonal
maximizer m* = (n - (q-1) k*, k*, ..., k*) in four stages: drain large colors
into color 1 until each sits at the mode of its two-color Ising conditional,
equalize colors 2..q, snap onto the diagonal, then slide along it. For
beta >= q/2 the path has at most 2n edges and never drops below
e^-(q-1) times the projected measure of its start.
"""

from __future__ import annotations

import logging
from collections.abc import Callable

import numpy as np

from discrete_annealing.errors import PreconditionBeta
from discrete_annealing.ising.landscape import landscape_profile
from discrete_annealing.potts.projected import (
    MagnetizationVector,
    compositions,
    diagonal_point,
    diagonal_profile,
    is_sorted,
    log_projected_weight,
)

logger = logging.getLogger(__name__)

PathFamily = Callable[[int, int], list[int]]


def check_low_temperature(q: int, beta: float) -> None:
    if beta < q / 2.0:
        raise PreconditionBeta(f"Path construction needs beta >= q/2 = {q / 2}, got {beta}")


def diagonal_maximizer(n: int, q: int, beta: float) -> MagnetizationVector:
    ks, log_p = diagonal_profile(n, q, beta)
    return diagonal_point(n, q, int(ks[int(np.argmax(log_p))]))


def _ising_mode_share(size: int, beta: float) -> int:
    """Smaller count at the mode of a two-color Ising conditional with ``size`` sites."""
    m, log_p = landscape_profile(size, beta)
    top = int(m[int(np.argmax(log_p))])
    return (size - top) // 2


def potts_path_construction(
    n: int, q: int, beta: float, m: MagnetizationVector
) -> list[MagnetizationVector]:
    """Vertices of the path from sorted ``m`` to the diagonal maximizer, both ends included."""
    check_low_temperature(q, beta)
    if n < q:
        raise ValueError(f"Path construction needs n >= q, got n={n}, q={q}")
    cur = [int(v) for v in m]
    if len(cur) != q or sum(cur) != n or any(v < 0 for v in cur):
        raise ValueError(f"{tuple(m)} is not a magnetization vector with {q} colors and {n} sites")
    if cur != sorted(cur, reverse=True):
        raise ValueError(f"{tuple(m)} is not sorted")

    target = diagonal_maximizer(n, q, beta)
    path = [tuple(cur)]
    if path[0] == target:
        return path

    def visit() -> None:
        if tuple(cur) != path[-1]:
            path.append(tuple(cur))

    # drain colors q..2 into color 1
    threshold = n / (2.0 * beta)
    for a in range(q - 1, 0, -1):
        if cur[a] < threshold:
            continue
        size = cur[0] + cur[a]
        floor = max(_ising_mode_share(size, size * beta / n), cur[a + 1] if a + 1 < q else 0)
        while cur[a] > floor:
            cur[a] -= 1
            cur[0] += 1
            visit()

    # equalize colors 2..q
    base, extra = divmod(n - cur[0], q - 1)
    goal = [base + 1] * extra + [base] * (q - 1 - extra)
    while cur[1:] != goal:
        a = max(i for i in range(1, q) if cur[i] > goal[i - 1])
        b = min(i for i in range(1, q) if cur[i] < goal[i - 1])
        while cur[a] > goal[a - 1] and cur[b] < goal[b - 1]:
            cur[a] -= 1
            cur[b] += 1
            visit()

    # snap onto the diagonal
    low = cur[q - 1]
    if cur[1] == low + 1:
        down, up = diagonal_point(n, q, low), diagonal_point(n, q, low + 1)
        stay = low == n // q or (
            log_projected_weight(n, q, beta, down)[0] >= log_projected_weight(n, q, beta, up)[0]
        )
        cur = list(down if stay else up)
    visit()

    # slide to the maximizer
    k_star = target[-1]
    while cur[q - 1] != k_star:
        step = 1 if cur[q - 1] < k_star else -1
        cur = list(diagonal_point(n, q, cur[q - 1] + step))
        visit()
    return path


def path_guarantees(
    n: int, q: int, beta: float, path: list[MagnetizationVector]
) -> tuple[int, float]:
    """(number of edges, min over vertices of log pi_bar(vertex) - log pi_bar(start))."""
    log_w = log_projected_weight(n, q, beta, np.array(path, dtype=np.int64))
    return len(path) - 1, float(np.min(log_w - log_w[0]))


def check_all_paths(n: int, q: int, beta: float) -> list[str]:
    """Run the construction from every sorted state and list guarantee violations."""
    states = compositions(n, q)
    violations = []
    for m in map(tuple, states[is_sorted(states)].tolist()):
        path = potts_path_construction(n, q, beta, m)
        length, dip = path_guarantees(n, q, beta, path)
        if length > 2 * n:
            violations.append(f"{m}: length {length} > {2 * n}")
        if dip < -(q - 1) - 1e-12:
            violations.append(f"{m}: measure dip {dip:.4g} below -{q - 1}")
        vertices = np.array(path, dtype=np.int64)
        steps = np.abs(np.diff(vertices, axis=0)).sum(axis=1) // 2
        if np.any(steps > q - 1) or np.any(steps == 0) or not np.all(is_sorted(vertices)):
            violations.append(f"{m}: step outside the folded graph")
    if violations:
        logger.warning("potts paths at n=%d q=%d beta=%.4g: %s", n, q, beta, violations[0])
    return violations


def transport_paths(n: int, q: int, beta: float, index: dict) -> PathFamily:
    """Index paths x -> m* -> y through the diagonal maximizer on the folded space.

    ``index`` maps sorted magnetization vectors to state indices.
    """
    cache: dict[int, list[int]] = {}
    labels = {i: label for label, i in index.items()}

    def to_mode(x: int) -> list[int]:
        if x not in cache:
            cache[x] = [index[v] for v in potts_path_construction(n, q, beta, labels[x])]
        return cache[x]

    def between(x: int, y: int) -> list[int]:
        return to_mode(x) + to_mode(y)[::-1][1:]

    return between

