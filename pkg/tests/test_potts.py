"""Tests for the mean-field Potts model, its projections, paths, flux and annealing."""

from __future__ import annotations

import math

import numpy as np
import pytest

from discrete_annealing.annealing.schedule import Schedule
from discrete_annealing.errors import BrokenPath, PreconditionBeta, UnbalancedD
from discrete_annealing.graph.state_graph import StateGraph
from discrete_annealing.ising.projected import ProjectedIsingChain
from discrete_annealing.markov.kernel import capacity_from_kernel
from discrete_annealing.models import StateSpace
from discrete_annealing.potts.flux import greedy_flux, route_unit_flow
from discrete_annealing.potts.initializer import init_beta, initial_mixture, potts_init
from discrete_annealing.potts.model import (
    PottsModel,
    block_glauber_kernel,
    configurations,
    magnetization_projection,
    monochrome_states,
    potts_distribution,
    sorted_projection,
)
from discrete_annealing.potts.paths import (
    check_all_paths,
    diagonal_maximizer,
    potts_path_construction,
    transport_paths,
)
from discrete_annealing.potts.pipeline import (
    PottsAnnealing,
    measure_derivative,
    potts_action,
    potts_pipeline,
)
from discrete_annealing.potts.projected import (
    ProjectedPottsChain,
    compositions,
    diagonal_profile,
    fold_multiplicity,
    potts_as_ising_gap,
    projected_size,
    size_bound,
)


def segment(x: int, y: int) -> list[int]:
    step = 1 if y > x else -1
    return list(range(x, y + step, step))


class TestCombinatorics:
    def test_compositions(self):
        assert compositions(3, 2).tolist() == [[0, 3], [1, 2], [2, 1], [3, 0]]
        assert len(compositions(4, 3)) == projected_size(4, 3) == 15
        assert projected_size(10, 4) <= size_bound(10, 4)

    def test_fold_multiplicity(self):
        m = np.array([[2, 1, 1], [4, 0, 0], [3, 1, 0]])
        assert fold_multiplicity(m).tolist() == [3, 3, 6]

    def test_configurations(self):
        colors = configurations(2, 3)
        assert colors.shape == (9, 2)
        assert colors[5].tolist() == [1, 2]

    def test_monochrome_states(self):
        assert monochrome_states(3, 2).tolist() == [0, 7]
        colors = configurations(3, 3)
        for code in monochrome_states(3, 3):
            assert len(set(colors[code].tolist())) == 1

    def test_model_needs_enough_sites(self):
        with pytest.raises(ValueError):
            PottsModel(n=2, q=3, beta=1.0)


class TestBlockGlauber:
    def test_reversible_on_unit_clock(self):
        pi = potts_distribution(4, 3, 1.0)
        kernel = block_glauber_kernel(pi, 4, 3)
        capacity_from_kernel(kernel, pi)
        assert kernel.max_exit_rate <= 1.0 + 1e-12

    @pytest.mark.parametrize("folded", [False, True])
    def test_lumps_to_projected_chain(self, folded):
        n, q, beta = 4, 3, 0.7
        pi = potts_distribution(n, q, beta)
        proj = sorted_projection(n, q) if folded else magnetization_projection(n, q)
        chain = ProjectedPottsChain(n, q, beta, folded=folded)
        assert proj.project_measure(pi).values == pytest.approx(chain.measure.values, rel=1e-10)
        lumped = proj.lump_kernel(block_glauber_kernel(pi, n, q), pi)
        assert np.allclose(lumped.rates, chain.kernel.rates, rtol=1e-10, atol=1e-14)

    def test_two_colors_reduce_to_ising(self):
        potts = ProjectedPottsChain(7, 2, 1.1)
        ising = ProjectedIsingChain(7, 1.1)
        assert potts.measure.values == pytest.approx(ising.measure.values, rel=1e-10)
        assert np.allclose(potts.kernel.rates, ising.kernel.rates, rtol=1e-10, atol=1e-14)

    def test_two_color_conditionals_are_ising(self):
        assert potts_as_ising_gap(6, 3, 1.2) < 1e-12


class TestLandscapeAndPaths:
    def test_diagonal_profile(self):
        ks, log_p = diagonal_profile(6, 3, 2.0)
        assert ks.tolist() == [0, 1, 2]
        assert np.all(log_p < 0.0)

    def test_low_temperature_precondition(self):
        with pytest.raises(PreconditionBeta):
            potts_path_construction(6, 3, 1.0, (6, 0, 0))

    def test_path_endpoints(self):
        target = diagonal_maximizer(6, 3, 2.0)
        path = potts_path_construction(6, 3, 2.0, (2, 2, 2))
        assert path[0] == (2, 2, 2)
        assert path[-1] == target
        assert potts_path_construction(6, 3, 2.0, target) == [target]

    def test_path_input_validation(self):
        with pytest.raises(ValueError):
            potts_path_construction(6, 3, 2.0, (1, 2, 3))
        with pytest.raises(ValueError):
            potts_path_construction(6, 3, 2.0, (4, 1, 0))

    def test_paths_stay_on_the_folded_graph(self):
        violations = check_all_paths(6, 3, 2.0)
        assert not [v for v in violations if "step outside" in v]

    def test_transport_paths_join_their_ends(self):
        chain = ProjectedPottsChain(6, 3, 2.0, folded=True)
        index = {label: i for i, label in enumerate(chain.graph.states)}
        between = transport_paths(6, 3, 2.0, index)
        route = between(0, chain.graph.size - 1)
        assert route[0] == 0
        assert route[-1] == chain.graph.size - 1
        route_unit_flow(chain.graph, route, 0, chain.graph.size - 1)


class TestGreedyFlux:
    def test_hand_example(self):
        graph = StateGraph.path(4)
        rate = [-1.0, 0.5, -0.5, 1.0]
        flux, plan = greedy_flux(graph, rate, segment)
        assert plan.pairs == {(0, 1): 0.5, (0, 3): 0.5, (2, 3): 0.5}
        assert flux.values.tolist() == [1.0, 0.5, 1.0]
        assert np.array(rate) + flux.divergence().values == pytest.approx(np.zeros(4))
        assert plan.violations(rate) == []
        assert plan.total_mass() == pytest.approx(1.5)

    def test_mapping_routes_either_orientation(self):
        graph = StateGraph.path(3)
        flux, _ = greedy_flux(graph, [1.0, 0.0, -1.0], {(0, 2): [0, 1, 2]})
        assert flux.values.tolist() == [-1.0, -1.0]

    def test_unbalanced(self):
        with pytest.raises(UnbalancedD):
            greedy_flux(StateGraph.path(4), [1.0, 0.0, 0.0, 0.0], segment)

    def test_broken_routes(self):
        graph = StateGraph.path(3)
        with pytest.raises(BrokenPath):
            greedy_flux(graph, [-1.0, 0.0, 1.0], {(0, 1): [0, 1]})
        with pytest.raises(BrokenPath):
            route_unit_flow(graph, [0, 2], 0, 2)


class TestInitializer:
    def test_certificate(self):
        nu, cert = potts_init(4, 3, 0.3)
        assert cert.space == StateSpace.FULL
        assert cert.certified
        assert cert.threshold == pytest.approx(0.1)
        assert cert.beta0 == pytest.approx(4 * math.log(3) + math.log(20.0))
        assert cert.monochrome_mass > 0.99
        assert nu.size == 81

    def test_same_kl_on_every_space(self):
        _, full = potts_init(4, 3, 0.3, StateSpace.FULL)
        _, projected = potts_init(4, 3, 0.3, StateSpace.PROJECTED)
        _, folded = potts_init(4, 3, 0.3, StateSpace.FOLDED)
        assert projected.kl == pytest.approx(full.kl, rel=1e-9)
        assert folded.kl == pytest.approx(full.kl, rel=1e-9)

    def test_mixture(self):
        nu = initial_mixture(4, 3, 0.3, StateSpace.FOLDED)
        states = ProjectedPottsChain(4, 3, 0.0, folded=True).states
        mono = int(np.flatnonzero(states.max(axis=1) == 4)[0])
        assert nu[mono] == pytest.approx(1.0 - 0.05 + 0.05 * 3 / 81)

    def test_certificate_sits_between_budget_shares(self):
        _, cert = potts_init(5, 3, 0.5)
        assert cert.certified
        assert cert.kl == pytest.approx(0.0857, abs=5e-4)
        assert 0.5 / 6 < cert.kl < 0.5 / 3

    def test_eps_range(self):
        with pytest.raises(ValueError):
            potts_init(4, 3, 1.0)


class TestPottsAnnealing:
    def test_reversed_schedule(self):
        problem = PottsAnnealing.reversed(4, 3, 1.5, 0.3)
        assert problem.beta0 == pytest.approx(init_beta(4, 3, 0.3))
        assert problem.beta == pytest.approx(1.5)
        _, cert = potts_init(4, 3, 0.3, StateSpace.FOLDED)
        assert problem.init_kl() == pytest.approx(cert.kl, rel=1e-9)
        assert problem.theorem_horizon(0.3) is None

    def test_stability_window(self):
        problem = PottsAnnealing.reversed(4, 3, 1.5, 0.3)
        gap = problem.beta0 - 1.5
        assert problem.stability_window(0.3, 10.0) == pytest.approx(0.3 / (24 * 2 * gap * 10.0))
        assert problem.stability_bound(0.0) == 0.0
        assert problem.stability_bound(0.01) == pytest.approx(math.expm1(4 * gap * 0.01))

    def test_kernel_matches_folded_chain(self):
        problem = PottsAnnealing.reversed(4, 3, 1.5, 0.3)
        chain = ProjectedPottsChain(4, 3, 1.5, folded=True)
        assert np.allclose(problem.kernel(1.0).rates, chain.kernel.rates, rtol=1e-10)

    def test_start_needs_eps(self):
        problem = PottsAnnealing(4, 3, Schedule.linear_down(5.0, 1.5))
        with pytest.raises(ValueError):
            problem.initial()

    def test_measure_derivative_is_balanced(self):
        rate = measure_derivative(5, 3, 2.0, -1.0)
        assert rate.sum() == pytest.approx(0.0, abs=1e-14)

    def test_constructive_flux_dominates(self):
        schedule = Schedule.linear_down(init_beta(4, 3, 0.3), 1.5)
        report = potts_action(4, 3, schedule, grid=21)
        assert report.holds
        assert report.exact.value <= report.constructive * (1 + 1e-9)

    def test_action_needs_low_temperature(self):
        with pytest.raises(PreconditionBeta):
            potts_action(4, 3, Schedule.linear_down(3.0, 1.0), grid=5)

    @pytest.mark.slow
    def test_pipeline_on_folded_chain(self):
        report = potts_pipeline(4, 3, 1.5, 0.5, full_space=False)
        assert report.init_kl < 0.5 / 3
        assert report.passed
