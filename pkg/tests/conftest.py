"""Shared test fixtures for the discrete annealing test suite."""

from __future__ import annotations

import numpy as np
import pytest

from discrete_annealing.graph.measures import Capacity, ProbVector
from discrete_annealing.graph.state_graph import StateGraph
from discrete_annealing.markov.kernel import RateKernel, ReversiblePair


def pair_from_capacity(graph: StateGraph, pi: ProbVector, weights: list[float]) -> ReversiblePair:
    """Reversible pair with p(x, y) = c(x, y) / pi(x)."""
    c = Capacity(graph, weights).to_matrix()
    return ReversiblePair(RateKernel.from_off_diagonal(graph, c / pi.values[:, None]), pi)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)


@pytest.fixture
def two_state() -> ReversiblePair:
    """pi = (1/4, 3/4) with c = 0.1 on the single edge."""
    return pair_from_capacity(StateGraph.path(2), ProbVector([0.25, 0.75]), [0.1])


@pytest.fixture
def path3() -> ReversiblePair:
    return pair_from_capacity(StateGraph.path(3), ProbVector([0.2, 0.3, 0.5]), [0.05, 0.1])


@pytest.fixture
def triangle() -> ReversiblePair:
    """Uniform pi on a 3-cycle with unit capacities."""
    return pair_from_capacity(StateGraph.cycle(3), ProbVector.uniform(3), [1.0, 1.0, 1.0])


@pytest.fixture
def make_pair():
    return pair_from_capacity
