"""Tests for continuity solves, the transport distance and curve actions."""

from __future__ import annotations

import numpy as np
import pytest

from discrete_annealing.errors import DisconnectedCapacity, InvalidMassRate, ZeroCapacityEdge
from discrete_annealing.graph.measures import Capacity, Flux, MassRate, ProbVector
from discrete_annealing.graph.state_graph import StateGraph
from discrete_annealing.markov.kernel import capacity_from_kernel
from discrete_annealing.suites import random_reversible_pair
from discrete_annealing.transport.action import CurveSpec, action, gibbs_curve, squared_speed
from discrete_annealing.transport.potential import (
    flux_cost,
    metric_derivative_sq,
    solve_continuity_potential,
    wc2_distance,
)


class TestContinuitySolve:
    def test_two_state_closed_form(self, two_state):
        rate = MassRate([-0.2, 0.2])
        value, flux = metric_derivative_sq(
            two_state.graph, two_state.capacity, rate, two_state.stationary
        )
        assert flux.value(0, 1) == pytest.approx(0.2)
        assert value == pytest.approx(0.04 / 0.1)

    def test_tree_solve(self, path3):
        rate = MassRate([-0.3, 0.0, 0.3])
        value, flux = metric_derivative_sq(path3.graph, path3.capacity, rate, path3.stationary)
        assert flux.values == pytest.approx([0.3, 0.3])
        assert value == pytest.approx(0.09 / 0.05 + 0.09 / 0.1)

    def test_cycle_uses_effective_resistance(self, triangle):
        rate = MassRate([-1.0, 1.0, 0.0])
        value, flux = metric_derivative_sq(
            triangle.graph, triangle.capacity, rate, triangle.stationary
        )
        assert value == pytest.approx(2.0 / 3.0)
        assert flux.value(0, 1) == pytest.approx(2.0 / 3.0)
        assert flux.value(0, 2) == pytest.approx(1.0 / 3.0)

    def test_flux_solves_continuity(self, rng):
        pair = random_reversible_pair(rng, 12)
        rate = MassRate.centered(rng.normal(size=12))
        _, flux = metric_derivative_sq(pair.graph, pair.capacity, rate, pair.stationary)
        assert np.abs(rate.values + flux.divergence().values).max() < 1e-10

    def test_potential_generates_the_flux(self, triangle):
        rate = MassRate([-1.0, 1.0, 0.0])
        psi = solve_continuity_potential(
            triangle.graph, triangle.capacity, rate, triangle.stationary
        )
        weights = triangle.capacity.weights
        flux = Flux(triangle.graph, weights * psi.edge_differences(triangle.graph))
        assert rate.values + flux.divergence().values == pytest.approx(np.zeros(3), abs=1e-12)
        assert triangle.stationary.expectation(psi.values) == pytest.approx(0.0, abs=1e-12)

    def test_zero_rate_costs_nothing(self, path3):
        value, flux = metric_derivative_sq(
            path3.graph, path3.capacity, MassRate.zeros(3), path3.stationary
        )
        assert value == 0.0
        assert not np.any(flux.values)

    def test_disconnected_capacity(self):
        g = StateGraph.path(3)
        with pytest.raises(DisconnectedCapacity):
            metric_derivative_sq(
                g, Capacity(g, [1.0, 0.0]), MassRate([-1.0, 0.0, 1.0]), ProbVector.uniform(3)
            )

    def test_flux_cost_rejects_dead_edges(self):
        g = StateGraph.path(3)
        with pytest.raises(ZeroCapacityEdge):
            flux_cost(Capacity(g, [1.0, 0.0]), Flux(g, [0.5, 0.5]))


class TestDistance:
    def test_identity(self, path3):
        pi = path3.stationary
        assert wc2_distance(path3.graph, path3.capacity, pi, pi) == 0.0

    def test_two_state_value(self, two_state):
        mu, nu = ProbVector([0.5, 0.5]), ProbVector([0.25, 0.75])
        assert wc2_distance(two_state.graph, two_state.capacity, mu, nu) == pytest.approx(
            np.sqrt(0.0625 / 0.1)
        )

    def test_symmetric(self, rng):
        pair = random_reversible_pair(rng, 6)
        mu = ProbVector.normalized(rng.uniform(0.1, 1.0, 6))
        nu = ProbVector.normalized(rng.uniform(0.1, 1.0, 6))
        d1 = wc2_distance(pair.graph, pair.capacity, mu, nu)
        d2 = wc2_distance(pair.graph, pair.capacity, nu, mu)
        assert d1 == pytest.approx(d2, rel=1e-12)


class TestAction:
    def _segment(self, two_state, horizon=1.0, grid=21):
        mu, nu = np.array([0.5, 0.5]), np.array([0.25, 0.75])
        return CurveSpec(
            two_state.graph,
            lambda s: ProbVector((1 - s / horizon) * mu + s / horizon * nu),
            lambda s: two_state.capacity,
            grid=grid,
            horizon=horizon,
        )

    def test_geodesic_segment_action(self, two_state):
        report = action(self._segment(two_state))
        assert report.value == pytest.approx(0.625, rel=1e-8)
        assert len(report.samples) == len(report.grid) == 21

    def test_time_rescaling_divides_action(self, two_state):
        curve = self._segment(two_state)
        slow = action(curve.time_rescaled(2.0))
        assert slow.value == pytest.approx(action(curve).value / 2.0, rel=1e-8)
        assert slow.horizon == 2.0

    def test_gibbs_rate_matches_finite_differences(self, path3):
        statistic = np.array([0.0, 1.0, 3.0])
        graph = path3.graph

        def capacity_of(pi):
            return Capacity(graph, np.minimum(pi.values[:-1], pi.values[1:]))

        curve = gibbs_curve(graph, statistic, lambda s: 2 * s, lambda s: 2.0, capacity_of, grid=11)
        assert curve.check_consistency(0.5) < 1e-6
        assert squared_speed(curve, 0.0) >= 0.0
        assert action(curve).value > 0.0

    def test_inconsistent_rate_rejected(self, path3):
        graph = path3.graph
        curve = CurveSpec(
            graph,
            lambda s: ProbVector.from_log_weights([0.0, s, 2 * s]),
            lambda s: capacity_from_kernel(path3.kernel, path3.stationary),
            rate=lambda s: MassRate([-1.0, 0.0, 1.0]),
            grid=5,
        )
        with pytest.raises(InvalidMassRate):
            action(curve)

    def test_grid_validation(self, two_state):
        with pytest.raises(ValueError):
            CurveSpec(two_state.graph, None, None, horizon=0.0)
        with pytest.raises(ValueError):
            CurveSpec(two_state.graph, None, None, grid=np.array([0.0, 0.5, 0.4]))
