"""Tests for schedules, the sampler, the exact law and the error-bound check."""

from __future__ import annotations

import numpy as np
import pytest
from scipy.stats import chisquare

from discrete_annealing.annealing.bounds import decomposition_terms, plan_run, verify_error_bound
from discrete_annealing.annealing.exact import exact_result, run_exact
from discrete_annealing.annealing.sampler import (
    distribution_sampler,
    poisson_counts,
    run_sampler,
    stream,
)
from discrete_annealing.annealing.schedule import Schedule
from discrete_annealing.annealing.stability import local_stability
from discrete_annealing.errors import ZeroRateEdge
from discrete_annealing.graph.state_graph import StateGraph
from discrete_annealing.ising.pipeline import IsingAnnealing
from discrete_annealing.markov.kernel import RateKernel
from discrete_annealing.models import AnnealConfig, HorizonRule, RunMode, StateSpace


def transition_family(problem):
    return lambda s: problem.kernel(s).to_transition_matrix()


@pytest.fixture
def small_ising() -> IsingAnnealing:
    return IsingAnnealing(3, 1.0, StateSpace.FULL)


class TestSchedule:
    def test_linear_up(self):
        schedule = Schedule.linear_up(2.0)
        assert schedule.beta(0.25) == pytest.approx(0.5)
        assert schedule.beta_prime(0.7) == 2.0
        assert (schedule.start, schedule.end) == (0.0, 2.0)

    def test_linear_down(self):
        schedule = Schedule.linear_down(3.0, 1.0)
        assert schedule.beta(0.5) == pytest.approx(2.0)
        assert schedule.beta_prime(0.1) == -2.0
        assert schedule.max_abs_derivative() == 2.0

    def test_custom_checks_derivative(self):
        good = Schedule.custom(lambda s: s**2, lambda s: 2 * s)
        assert good.derivative_gap() < 1e-8
        with pytest.raises(ValueError):
            Schedule.custom(lambda s: s**2, lambda s: 1.0)

    def test_negative_temperatures_rejected(self):
        with pytest.raises(ValueError):
            Schedule.linear_up(-1.0)
        with pytest.raises(ValueError):
            Schedule.custom(lambda s: -1.0 - s, lambda s: -1.0)


class TestSampler:
    def test_stream_is_deterministic(self):
        a = stream(11, 2, 3).random(4)
        assert np.array_equal(a, stream(11, 2, 3).random(4))
        assert not np.array_equal(a, stream(11, 2, 4).random(4))

    def test_poisson_counts(self):
        assert poisson_counts(np.array([0.3, 0.9]), 0.0).tolist() == [0, 0]
        counts = poisson_counts(np.array([0.0, 0.5, 0.999999]), 5.0, max_jumps=2)
        assert counts.tolist() == [0, 2, 2]

    def test_distribution_sampler_respects_support(self, rng):
        draw = distribution_sampler(np.array([0.0, 1.0, 0.0]))
        assert set(draw(rng, 50).tolist()) == {1}

    def test_replicates_are_independent_of_batch_size(self, small_ising):
        transitions = transition_family(small_ising)
        initial = distribution_sampler(small_ising.initial().values)
        three = run_sampler(
            transitions, AnnealConfig(horizon=5.0, layers=10, seed=7, replicates=3), initial
        )
        five = run_sampler(
            transitions, AnnealConfig(horizon=5.0, layers=10, seed=7, replicates=5), initial
        )
        assert three.mode == RunMode.SAMPLE
        assert five.final_states[:3] == three.final_states
        assert len(three.layer_jumps) == 10

    def test_zero_horizon_keeps_the_initial_draw(self, small_ising):
        transitions = transition_family(small_ising)
        initial = distribution_sampler(small_ising.initial().values)
        result = run_sampler(
            transitions, AnnealConfig(horizon=0.0, layers=3, seed=1, replicates=4), initial
        )
        assert result.total_jumps == 0
        assert result.final_states == initial(stream(1, 0, 0), 4).tolist()

    def test_constant_schedule_keeps_the_stationary_law(self):
        problem = IsingAnnealing(3, 1.0)
        pi = problem.target().values
        step = problem.kernel(1.0).to_transition_matrix()
        config = AnnealConfig(horizon=5.0, layers=5, seed=21, replicates=4000)
        result = run_sampler(lambda s: step, config, distribution_sampler(pi))
        empirical = np.bincount(result.final_states, minlength=pi.size) / config.replicates
        band = 3.0 * np.sqrt(pi * (1.0 - pi) / config.replicates)
        assert np.all(np.abs(empirical - pi) <= band)

    def test_sampler_follows_the_exact_law(self, small_ising):
        config = AnnealConfig(horizon=2.0, layers=4, seed=11, replicates=4000)
        initial = small_ising.initial()
        result = run_sampler(
            transition_family(small_ising), config, distribution_sampler(initial.values)
        )
        exact = np.array(exact_result(small_ising.kernel, config, initial).final_marginal)
        counts = np.bincount(result.final_states, minlength=exact.size)
        expected = exact / exact.sum() * counts.sum()
        assert chisquare(counts, expected).pvalue > 0.01


class TestExactLaw:
    def test_exact_result_wraps_the_marginal(self, small_ising):
        config = AnnealConfig(horizon=2.0, layers=4)
        final = run_exact(small_ising.kernel, config, small_ising.initial())
        result = exact_result(small_ising.kernel, config, small_ising.initial())
        assert result.mode == RunMode.EXACT
        assert result.final_marginal == pytest.approx(final.values.tolist())

    def test_long_run_reaches_the_target(self, small_ising):
        config = AnnealConfig(horizon=4000.0, layers=40)
        final = run_exact(small_ising.kernel, config, small_ising.initial())
        assert np.abs(final.values - small_ising.target().values).max() < 1e-4


class TestStability:
    def test_constant_family_is_stable(self, two_state):
        assert local_stability(lambda s: two_state.kernel, 0.1) == 0.0

    def test_support_change_is_rejected(self):
        graph = StateGraph.path(2)

        def family(s):
            return RateKernel.from_edge_rates(graph, [s], [0.1])

        with pytest.raises(ZeroRateEdge):
            local_stability(family, 0.1)


class TestErrorBound:
    def test_decomposition_terms(self):
        action_term, stability_term, total = decomposition_terms(0.1, 2.0, 10.0, 0.01)
        assert action_term == pytest.approx(0.0505)
        assert stability_term == pytest.approx(0.2)
        assert total == pytest.approx(0.3505)

    def test_plan_run_rules(self):
        problem = IsingAnnealing(4, 1.0)
        horizon, layers = plan_run(problem, 0.3, 1.0, HorizonRule.THEOREM)
        assert horizon == pytest.approx(2 * 4**5 / 0.3)
        assert layers == 546134
        horizon, layers = plan_run(problem, 0.3, 1.0, HorizonRule.ACTION)
        assert horizon == pytest.approx(2.0 / 0.3)
        assert layers == 534
        assert plan_run(problem, 0.3, 1.0, horizon=3.0, layers=7) == (3.0, 7)

    def test_ising_error_bound(self):
        report = verify_error_bound(IsingAnnealing(4, 1.0), 0.3)
        assert report.init_kl == 0.0
        assert report.passed
        assert report.decomposition_holds

    def test_eps_must_be_positive(self):
        with pytest.raises(ValueError):
            verify_error_bound(IsingAnnealing(2, 1.0), 0.0)

    @pytest.mark.slow
    def test_theorem_sized_run(self):
        report = verify_error_bound(IsingAnnealing(4, 1.0), 0.3, horizon_rule=HorizonRule.THEOREM)
        assert report.horizon == pytest.approx(6826.666666666667)
        assert report.layers == 546134
        assert report.passed
