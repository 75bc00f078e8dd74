"""Tests for projections, lumping and metric-derivative invariance."""

from __future__ import annotations

import numpy as np
import pytest

from discrete_annealing.errors import InvalidGraph, SymmetryViolation
from discrete_annealing.graph.measures import MassRate, ProbVector
from discrete_annealing.graph.state_graph import StateGraph
from discrete_annealing.ising.model import (
    folding_projection,
    glauber_kernel,
    ising_distribution,
    magnetization_projection,
    magnetizations,
)
from discrete_annealing.ising.pipeline import IsingAnnealing
from discrete_annealing.ising.projected import ProjectedIsingChain
from discrete_annealing.markov.kernel import ReversiblePair
from discrete_annealing.models import StateSpace
from discrete_annealing.symmetry.projection import Projection, project_measure
from discrete_annealing.symmetry.verify import (
    compare_actions,
    compare_metric_derivative,
    verify_symmetry,
)


def gibbs_rate(n: int, beta_prime: float, pi: ProbVector) -> MassRate:
    stat = magnetizations(n).astype(float) ** 2 / (2.0 * n)
    return MassRate.centered(beta_prime * pi.values * (stat - pi.expectation(stat)))


class TestProjection:
    def test_fibers(self):
        proj = magnetization_projection(3)
        assert list(proj.target.states) == [-3, -1, 1, 3]
        assert [f.size for f in proj.fibers] == [1, 3, 3, 1]
        assert proj.fiber_of(3).tolist() == [0]
        assert proj.target.num_edges == 3

    def test_identity(self):
        proj = Projection.identity(StateGraph.path(3))
        assert [f.tolist() for f in proj.fibers] == [[0], [1], [2]]

    def test_validation(self):
        g = StateGraph.path(3)
        with pytest.raises(InvalidGraph):
            Projection(g, ["a", "b"])
        with pytest.raises(InvalidGraph):
            Projection(g, ["a", "b", "c"], order=["a", "b"])
        with pytest.raises(InvalidGraph):
            Projection(g, ["a", "a", "b"], order=["a", "b", "c"])

    def test_composition_folds(self):
        first = magnetization_projection(4)
        second = Projection(first.target, [abs(m) for m in first.target.states])
        assert first.then(second).index.tolist() == folding_projection(4).index.tolist()

    @pytest.mark.parametrize("n", [3, 4])
    def test_pushforward_matches_projected_chain(self, n):
        pi = ising_distribution(n, 1.3)
        chain = ProjectedIsingChain(n, 1.3)
        assert project_measure(magnetization_projection(n), pi).values == pytest.approx(
            chain.measure.values, rel=1e-12
        )


class TestLumping:
    @pytest.mark.parametrize("n", [4, 5])
    @pytest.mark.parametrize("folded", [False, True])
    def test_glauber_lumps_to_closed_form(self, n, folded):
        pi = ising_distribution(n, 0.8)
        proj = folding_projection(n) if folded else magnetization_projection(n)
        chain = ProjectedIsingChain(n, 0.8, folded=folded)
        lumped = proj.lump_kernel(glauber_kernel(pi, n), pi)
        assert np.allclose(lumped.rates, chain.kernel.rates, rtol=1e-10, atol=1e-14)

    def test_projected_capacity(self):
        n = 4
        pi = ising_distribution(n, 0.8)
        full = ReversiblePair(glauber_kernel(pi, n), pi)
        projected = magnetization_projection(n).project_capacity(full.capacity)
        chain = ProjectedIsingChain(n, 0.8)
        assert projected.weights == pytest.approx(chain.capacity.weights, rel=1e-10)


class TestSymmetry:
    def test_ising_is_symmetric(self):
        pi = ising_distribution(4, 1.0)
        report = verify_symmetry(magnetization_projection(4), pi, glauber_kernel(pi, 4))
        assert report.passed
        assert report.failures == []

    def test_random_measure_breaks_symmetry(self, rng):
        pi = ProbVector.normalized(rng.uniform(0.2, 1.0, 8))
        report = verify_symmetry(magnetization_projection(3), pi, glauber_kernel(pi, 3))
        assert not report.passed
        assert report.measure_violation > 0.0
        assert report.measure_fiber in {"-1", "1"}

    def test_metric_derivative_is_preserved(self):
        n, beta = 4, 1.2
        pi = ising_distribution(n, beta)
        full = ReversiblePair(glauber_kernel(pi, n), pi)
        chain = ProjectedIsingChain(n, beta)
        projected = ReversiblePair(chain.kernel, chain.measure)
        result = compare_metric_derivative(
            magnetization_projection(n), full, projected, gibbs_rate(n, 1.0, pi)
        )
        assert result.gap < 1e-8
        assert result.full > 0.0

    def test_metric_derivative_refuses_broken_symmetry(self, rng):
        pi = ProbVector.normalized(rng.uniform(0.2, 1.0, 8))
        full = ReversiblePair(glauber_kernel(pi, 3), pi)
        chain = ProjectedIsingChain(3, 1.0)
        projected = ReversiblePair(chain.kernel, chain.measure)
        with pytest.raises(SymmetryViolation):
            compare_metric_derivative(
                magnetization_projection(3), full, projected, MassRate.zeros(8)
            )

    def test_actions_agree(self):
        problem = IsingAnnealing(4, 1.0, StateSpace.FULL)
        full, projected = compare_actions(folding_projection(4), problem.curve(11))
        assert projected.value == pytest.approx(full.value, rel=1e-7)
