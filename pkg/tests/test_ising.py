"""Tests for the mean-field Ising model, its projected chains and the annealing pipeline."""

from __future__ import annotations

import math

import numpy as np
import pytest
from pydantic import ValidationError

from discrete_annealing.errors import TooLarge
from discrete_annealing.graph.measures import ProbVector
from discrete_annealing.ising.landscape import (
    classify_profile,
    dlog_folded_measure,
    dlog_norm_bound,
    landscape_classify,
    landscape_profile,
)
from discrete_annealing.ising.model import (
    IsingModel,
    glauber_kernel,
    hypercube,
    ising_distribution,
    magnetizations,
)
from discrete_annealing.ising.pipeline import IsingAnnealing, ising_pipeline
from discrete_annealing.ising.projected import ProjectedIsingChain
from discrete_annealing.markov.inequalities import canonical_paths_congestion, poincare_constant
from discrete_annealing.markov.kernel import ReversiblePair, capacity_from_kernel
from discrete_annealing.models import HorizonRule, LandscapeShape, StateSpace
from discrete_annealing.transport.action import action


class TestFullModel:
    def test_hypercube(self):
        g = hypercube(3)
        assert g.size == 8
        assert g.num_edges == 12
        assert g.neighbors(0) == [1, 2, 4]

    def test_size_limits(self):
        with pytest.raises(TooLarge):
            hypercube(13)
        with pytest.raises(ValueError):
            hypercube(0)

    def test_magnetizations(self):
        assert magnetizations(2).tolist() == [2, 0, 0, -2]
        assert magnetizations(3).sum() == 0

    def test_distribution_favours_alignment(self):
        pi = ising_distribution(3, 1.0)
        assert pi[0] == pytest.approx(pi[7])
        assert pi[0] / pi[1] == pytest.approx(math.exp(1.0 * (9 - 1) / 6.0))

    def test_glauber_is_reversible_on_unit_clock(self):
        pi = ising_distribution(4, 1.5)
        kernel = glauber_kernel(pi, 4)
        capacity_from_kernel(kernel, pi)
        assert kernel.max_exit_rate <= 1.0
        assert kernel.to_transition_matrix().min() >= 0.0

    def test_glauber_needs_hypercube_size(self):
        with pytest.raises(ValueError):
            glauber_kernel(ProbVector.uniform(6))

    def test_model_validation(self):
        model = IsingModel(n=3, beta=0.5)
        assert model.graph.size == 8
        assert model.kernel().size == 8
        with pytest.raises(ValidationError):
            IsingModel(n=0, beta=1.0)


class TestProjectedChain:
    @pytest.mark.parametrize("folded", [False, True])
    def test_closed_form_capacity(self, folded):
        chain = ProjectedIsingChain(9, 1.4, folded=folded)
        exact = capacity_from_kernel(chain.kernel, chain.measure)
        assert chain.capacity.weights == pytest.approx(exact.weights, rel=1e-10)

    @pytest.mark.parametrize("n", [5, 20, 200])
    @pytest.mark.parametrize("beta", [0.5, 2.0])
    def test_capacity_lower_bound(self, n, beta):
        assert ProjectedIsingChain(n, beta).capacity_bound_slack() >= 1.0
        assert ProjectedIsingChain(n, beta, folded=True).capacity_bound_slack() >= 1.0

    def test_states(self):
        assert ProjectedIsingChain(4, 1.0).m.tolist() == [-4, -2, 0, 2, 4]
        assert ProjectedIsingChain(5, 1.0, folded=True).m.tolist() == [1, 3, 5]
        assert ProjectedIsingChain(4, 1.0, folded=True).index_of(2) == 1

    def test_folded_measure_sums_mirror_states(self):
        chain = ProjectedIsingChain(6, 0.9)
        folded = ProjectedIsingChain(6, 0.9, folded=True)
        pi = chain.measure.values
        expected = [pi[3], pi[2] + pi[4], pi[1] + pi[5], pi[0] + pi[6]]
        assert folded.measure.values == pytest.approx(expected)

    def test_canonical_paths(self):
        chain = ProjectedIsingChain(8, 1.0, folded=True)
        paths = chain.canonical_paths()
        assert len(paths) == math.comb(chain.m.size, 2)
        assert paths[(0, 2)] == [0, 1, 2]
        pair = ReversiblePair(chain.kernel, chain.measure)
        assert canonical_paths_congestion(pair, paths) >= poincare_constant(pair) * (1 - 1e-10)

    def test_validation(self):
        with pytest.raises(ValueError):
            ProjectedIsingChain(0, 1.0)
        with pytest.raises(ValueError):
            ProjectedIsingChain(4, -1.0)


class TestLandscape:
    @pytest.mark.parametrize(
        "values, shape",
        [
            ([0.0, 0.0, 0.0], LandscapeShape.CONSTANT),
            ([5.0], LandscapeShape.CONSTANT),
            ([0.0, 1.0, 2.0], LandscapeShape.INCREASING),
            ([2.0, 1.0, 0.0], LandscapeShape.DECREASING),
            ([0.0, 2.0, 2.0, 1.0], LandscapeShape.UNIMODAL),
            ([0.0, 2.0, 1.0, 3.0], LandscapeShape.OTHER),
        ],
    )
    def test_classify_profile(self, values, shape):
        assert classify_profile(np.array(values)) == shape

    def test_high_temperature_decreases(self):
        report = landscape_classify(20, 0.5)
        assert report.must_decrease
        assert report.shape == LandscapeShape.DECREASING
        assert report.mode == 0
        assert report.consistent

    def test_low_temperature_mode(self):
        report = landscape_classify(20, 2.0)
        assert report.mode_bound == pytest.approx(20 * math.sqrt(0.5))
        assert report.mode_bound_holds
        assert report.consistent

    @pytest.mark.parametrize("n", [10, 31, 60])
    def test_critical_window(self, n):
        report = landscape_classify(n, 1.0 - 0.5 / n)
        assert report.middle_bound_holds is not None
        assert report.consistent

    def test_profile_covers_nonnegative_magnetizations(self):
        m, log_p = landscape_profile(7, 1.0)
        assert m.tolist() == [1, 3, 5, 7]
        assert log_p.max() < 0.0

    def test_log_derivative(self):
        n, beta = 12, 1.3
        chain = ProjectedIsingChain(n, beta, folded=True)
        dlog = dlog_folded_measure(n, beta, 2.0)
        assert chain.measure.expectation(dlog) == pytest.approx(0.0, abs=1e-12)
        assert chain.measure.expectation(dlog**2) <= dlog_norm_bound(n, 2.0)


class TestIsingAnnealing:
    def test_starts_at_uniform(self):
        problem = IsingAnnealing(5, 1.0)
        assert problem.init_kl() == 0.0
        assert problem.graph.size == 3

    def test_closed_form_values(self):
        problem = IsingAnnealing(4, 1.0)
        assert problem.action_bound() == pytest.approx(64.0)
        assert problem.theorem_horizon(0.3) == pytest.approx(6826.666666666667)
        assert problem.theorem_layers(0.3) == 546134
        assert problem.stability_window(0.3, 10.0) == pytest.approx(0.00125)
        assert IsingAnnealing(4, 0.0).stability_window(0.3, 10.0) == math.inf

    @pytest.mark.parametrize("space", [StateSpace.PROJECTED, StateSpace.FOLDED])
    def test_kernel_matches_lumped_glauber(self, space):
        problem = IsingAnnealing(6, 1.5, space)
        chain = ProjectedIsingChain(6, 1.5, folded=space == StateSpace.FOLDED)
        assert np.allclose(problem.kernel(1.0).rates, chain.kernel.rates, rtol=1e-12)
        assert problem.target().values == pytest.approx(chain.measure.values, rel=1e-12)

    def test_full_space_kernel(self):
        problem = IsingAnnealing(3, 1.0, StateSpace.FULL)
        pi = ising_distribution(3, 0.5)
        assert np.allclose(problem.kernel(0.5).rates, glauber_kernel(pi, 3).rates)

    @pytest.mark.parametrize("n", [4, 8])
    @pytest.mark.parametrize("beta", [1.0, 2.0])
    def test_action_below_closed_form(self, n, beta):
        problem = IsingAnnealing(n, beta)
        assert action(problem.curve(51)).value <= problem.action_bound()

    def test_pipeline_without_run(self):
        report = ising_pipeline(4, 1.0, 0.3, run=False)
        assert report.horizon == pytest.approx(6826.666666666667)
        assert report.layers == 546134
        assert report.final_kl is None
        assert report.action <= report.action_bound

    def test_pipeline_action_rule(self):
        report = ising_pipeline(4, 1.0, 0.3, HorizonRule.ACTION, run=True)
        assert report.horizon == pytest.approx(2.0 * report.action / 0.3)
        assert report.passed
        assert report.final_kl <= 0.3

    def test_pipeline_validation(self):
        with pytest.raises(ValueError):
            ising_pipeline(4, 1.0, 1.5)
        with pytest.raises(ValueError):
            ising_pipeline(0, 1.0, 0.3)
