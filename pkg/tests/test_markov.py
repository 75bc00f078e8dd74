"""Tests for rate kernels, divergences, evolution and functional inequalities."""

from __future__ import annotations

import math

import numpy as np
import pytest

from discrete_annealing.errors import (
    AbsoluteContinuity,
    BrokenPath,
    InvalidKernel,
    NonStochasticRow,
    NotReversible,
    TooLargeForGrid,
)
from discrete_annealing.graph.measures import MassRate, ProbVector
from discrete_annealing.graph.state_graph import StateGraph
from discrete_annealing.markov.divergences import (
    chi2,
    entropy_functional,
    kl,
    tv_distance,
    variance_functional,
)
from discrete_annealing.markov.evolution import (
    FokkerPlanckIntegrator,
    KernelSchedule,
    apply_semigroup,
    evolve_fokker_planck,
    evolve_with_drift,
)
from discrete_annealing.markov.inequalities import (
    canonical_paths_congestion,
    gibbs_speed_bound,
    mlsi_constant,
    poincare_constant,
    spectral_gap,
)
from discrete_annealing.markov.kernel import (
    RateKernel,
    ReversiblePair,
    capacity_from_kernel,
    check_stochastic,
)
from discrete_annealing.suites import random_reversible_pair
from discrete_annealing.transport.potential import wc2_distance


class TestRateKernel:
    def test_rows_sum_to_zero(self):
        k = RateKernel.from_edge_rates(StateGraph.path(3), [0.2, 0.4], [0.1, 0.3])
        assert np.allclose(k.rates.sum(axis=1), 0.0)
        assert k.exit_rates.tolist() == pytest.approx([0.2, 0.5, 0.3])
        assert k.max_exit_rate == pytest.approx(0.5)

    def test_negative_rate_rejected(self):
        with pytest.raises(InvalidKernel):
            RateKernel.from_off_diagonal(StateGraph.path(2), [[0.0, -1.0], [1.0, 0.0]])

    def test_rate_outside_graph_rejected(self):
        off = np.zeros((3, 3))
        off[0, 2] = 1.0
        with pytest.raises(InvalidKernel):
            RateKernel.from_off_diagonal(StateGraph.path(3), off)

    def test_transition_matrix_round_trip(self):
        g = StateGraph.path(2)
        P = np.array([[0.7, 0.3], [0.4, 0.6]])
        k = RateKernel.from_transition_matrix(g, P)
        assert np.allclose(k.to_transition_matrix(), P)

    def test_unit_clock_exceeded(self):
        k = RateKernel.from_edge_rates(StateGraph.path(2), [2.0], [1.0])
        with pytest.raises(InvalidKernel):
            k.to_transition_matrix()

    def test_check_stochastic(self):
        with pytest.raises(NonStochasticRow):
            check_stochastic(np.array([[0.5, 0.6], [0.5, 0.5]]))

    def test_stationary_distribution(self, path3):
        assert path3.kernel.stationary_distribution().values == pytest.approx(
            path3.stationary.values
        )


class TestReversibility:
    def test_capacity_is_pi_times_rate(self, path3):
        assert path3.capacity.weights == pytest.approx([0.05, 0.1])

    def test_cycle_flow_is_not_reversible(self):
        g = StateGraph.cycle(3)
        off = np.zeros((3, 3))
        for x in range(3):
            off[x, (x + 1) % 3] = 1.0
            off[x, (x - 1) % 3] = 0.5
        with pytest.raises(NotReversible) as info:
            capacity_from_kernel(RateKernel.from_off_diagonal(g, off), ProbVector.uniform(3))
        assert info.value.edge == (0, 1)
        assert info.value.ratio == pytest.approx(2.0)

    def test_dirichlet_form(self, two_state):
        assert two_state.dirichlet_form([0.0, 1.0], [0.0, 1.0]) == pytest.approx(0.1)


class TestDivergences:
    def test_kl(self):
        value = kl([0.5, 0.5], [0.25, 0.75])
        assert value == pytest.approx(0.5 * math.log(2.0) + 0.5 * math.log(2.0 / 3.0))
        assert kl([0.3, 0.7], [0.3, 0.7]) == 0.0

    def test_kl_absolute_continuity(self):
        with pytest.raises(AbsoluteContinuity):
            kl([0.5, 0.5], [1.0, 0.0])
        assert kl([1.0, 0.0], [0.5, 0.5]) == pytest.approx(math.log(2.0))

    def test_chi2_and_tv(self):
        assert chi2([0.5, 0.5], [0.25, 0.75]) == pytest.approx(0.0625 / 0.25 + 0.0625 / 0.75)
        assert tv_distance([0.5, 0.5], [0.25, 0.75]) == pytest.approx(0.25)

    def test_functionals(self):
        pi = ProbVector([0.5, 0.5])
        assert variance_functional(pi, [0.0, 2.0]) == pytest.approx(1.0)
        assert entropy_functional(pi, [1.0, 1.0]) == pytest.approx(0.0)
        assert entropy_functional(pi, [0.0, 2.0]) == pytest.approx(math.log(2.0))


class TestEvolution:
    def test_two_state_relaxation(self):
        k = RateKernel.from_edge_rates(StateGraph.path(2), [0.3], [0.1])
        mu = evolve_fokker_planck(ProbVector([0.9, 0.1]), KernelSchedule.constant(k, 2.0))
        expected = 0.75 + (0.1 - 0.75) * math.exp(-0.4 * 2.0)
        assert mu[1] == pytest.approx(expected, rel=1e-10)

    def test_layered_pieces_compose(self):
        k = RateKernel.from_edge_rates(StateGraph.path(3), [0.2, 0.5], [0.4, 0.1])
        mu0 = ProbVector([0.6, 0.3, 0.1])
        one = evolve_fokker_planck(mu0, KernelSchedule.constant(k, 3.0))
        many = evolve_fokker_planck(mu0, KernelSchedule.layered(lambda i: k, 3.0, 6))
        assert many.values == pytest.approx(one.values, rel=1e-10)

    def test_marginals_per_piece(self):
        k = RateKernel.from_edge_rates(StateGraph.path(2), [0.3], [0.1])
        schedule = KernelSchedule.layered(lambda i: k, 1.0, 4)
        mu0 = ProbVector([0.5, 0.5])
        marginals = FokkerPlanckIntegrator().marginals(mu0, schedule)
        assert len(marginals) == 4
        assert marginals[-1].values == pytest.approx(evolve_fokker_planck(mu0, schedule).values)

    def test_drift_is_reported(self):
        k = RateKernel.from_edge_rates(StateGraph.path(3), [0.2, 0.5], [0.4, 0.1])
        mu0 = ProbVector([0.6, 0.3, 0.1])
        schedule = KernelSchedule.layered(lambda i: k, 3.0, 6)
        final, drift = evolve_with_drift(mu0, schedule)
        assert 0.0 <= drift < 1e-12
        assert final.values == pytest.approx(evolve_fokker_planck(mu0, schedule).values)

    def test_semigroup_fixes_constants(self, path3):
        assert apply_semigroup(path3.kernel, np.ones(3), 5.0) == pytest.approx(np.ones(3))

    def test_schedule_validation(self):
        k = RateKernel.from_edge_rates(StateGraph.path(2), [0.3], [0.1])
        with pytest.raises(ValueError):
            KernelSchedule([1.0, -1.0], [k, k])
        with pytest.raises(ValueError):
            KernelSchedule([1.0, 1.0], [k])


class TestInequalities:
    def test_two_state_gap(self, two_state):
        assert spectral_gap(two_state) == pytest.approx(0.1 / 0.25 + 0.1 / 0.75)
        assert poincare_constant(two_state) == pytest.approx(0.25 * 0.75 / 0.1)

    def test_transport_variance_is_tight_on_two_states(self, two_state):
        mu = ProbVector([0.6, 0.4])
        w2 = wc2_distance(two_state.graph, two_state.capacity, mu, two_state.stationary) ** 2
        bound = poincare_constant(two_state) * chi2(mu, two_state.stationary)
        assert w2 == pytest.approx(bound, rel=1e-10)

    def test_transport_variance_on_random_chains(self, rng):
        for _ in range(5):
            pair = random_reversible_pair(rng, 7)
            c_pi = poincare_constant(pair)
            mu = ProbVector.normalized(rng.uniform(0.1, 1.0, 7))
            w2 = wc2_distance(pair.graph, pair.capacity, mu, pair.stationary) ** 2
            assert w2 <= c_pi * chi2(mu, pair.stationary) * (1 + 1e-9)

    def test_mlsi_exceeds_half_poincare(self, two_state):
        estimate = mlsi_constant(two_state, resolution=200)
        assert estimate.value >= 0.45 * poincare_constant(two_state)
        assert estimate.certified >= estimate.value

    def test_mlsi_grid_needs_small_space(self, rng):
        with pytest.raises(TooLargeForGrid):
            mlsi_constant(random_reversible_pair(rng, 5))

    def test_canonical_paths_bound_poincare(self, path3):
        paths = {(0, 1): [0, 1], (0, 2): [0, 1, 2], (1, 2): [1, 2]}
        assert canonical_paths_congestion(path3, paths) >= poincare_constant(path3) * (1 - 1e-12)

    def test_canonical_paths_need_every_pair(self, path3):
        with pytest.raises(BrokenPath):
            canonical_paths_congestion(path3, {(0, 1): [0, 1], (1, 2): [1, 2]})
        with pytest.raises(BrokenPath):
            canonical_paths_congestion(path3, {(0, 1): [0, 1], (0, 2): [0, 2], (1, 2): [1, 2]})

    def test_speed_bound(self, rng):
        pair = random_reversible_pair(rng, 6)
        rate = MassRate.centered(pair.stationary.values * rng.normal(size=6))
        speed, bound = gibbs_speed_bound(pair, rate)
        assert speed <= bound * (1 + 1e-9)

    def test_pair_accepts_reversible_kernel(self, path3):
        pair = ReversiblePair(path3.kernel, path3.stationary)
        assert pair.graph.size == 3
