"""Tests for path-measure divergences and the reference chain."""

from __future__ import annotations

import math

import numpy as np
import pytest

from discrete_annealing.errors import NegativeRate, RateCapExceeded, SupportMismatch
from discrete_annealing.girsanov.path_kl import (
    discrete_path_kl,
    edge_kl_cost,
    kl_rate,
    path_kl,
    psi,
)
from discrete_annealing.girsanov.reference import (
    ReferenceChain,
    reference_kernel,
    reference_multipliers,
)
from discrete_annealing.graph.measures import Flux
from discrete_annealing.graph.state_graph import StateGraph
from discrete_annealing.ising.pipeline import IsingAnnealing
from discrete_annealing.markov.kernel import RateKernel, capacity_from_kernel
from discrete_annealing.models import StateSpace
from discrete_annealing.transport.action import action


class TestScalarCosts:
    def test_psi_endpoints(self):
        assert psi(0.0) == 1.0
        assert psi(1.0) == 0.0
        assert psi(math.e) == pytest.approx(1.0)

    def test_psi_rejects_negative(self):
        with pytest.raises(NegativeRate):
            psi(-0.1)

    def test_edge_cost_is_even_and_quadratic_below(self):
        rho = np.linspace(-5.0, 5.0, 41)
        cost = edge_kl_cost(rho)
        assert cost == pytest.approx(edge_kl_cost(-rho))
        assert np.all(cost <= rho**2 / 4.0 + 1e-15)
        assert edge_kl_cost(0.0) == 0.0

    def test_edge_cost_is_two_sided_psi(self):
        rho = np.array([-3.0, -0.2, 1e-4, 0.7, 4.0])
        forward, backward = reference_multipliers(rho)
        assert psi(forward) + psi(backward) == pytest.approx(edge_kl_cost(rho), rel=1e-10)

    def test_multipliers(self):
        rho = np.array([-2.0, 0.0, 0.5, 30.0])
        forward, backward = reference_multipliers(rho)
        assert forward - backward == pytest.approx(rho)
        assert forward * backward == pytest.approx(np.ones(4))


class TestPathKL:
    def test_kl_rate_vanishes_on_equal_kernels(self, path3):
        assert kl_rate(path3.kernel, path3.kernel, path3.stationary) == 0.0

    def test_equal_kernels_leave_initial_kl(self, two_state):
        k = two_state.kernel
        value = path_kl(lambda t: k, lambda t: k, lambda t: two_state.stationary, 0.1, 2.0)
        assert value == pytest.approx(0.1)
        discrete = discrete_path_kl(lambda t: k, lambda t: k, two_state.stationary, 0.1, 2.0, 50)
        assert discrete == pytest.approx(0.1)

    def test_discrete_oracle_converges(self, two_state):
        p = two_state.kernel
        q = RateKernel.from_edge_rates(StateGraph.path(2), [0.2], [0.3])
        pi = two_state.stationary
        continuous = path_kl(lambda t: p, lambda t: q, lambda t: pi, 0.0, 1.0)
        assert continuous == pytest.approx(kl_rate(p, q, pi))
        discrete = discrete_path_kl(lambda t: p, lambda t: q, pi, 0.0, 1.0, 1000)
        assert discrete == pytest.approx(continuous, rel=1e-2)

    def test_support_mismatch(self, two_state):
        q = RateKernel.from_edge_rates(StateGraph.path(2), [0.0], [0.1])
        with pytest.raises(SupportMismatch):
            kl_rate(two_state.kernel, q, two_state.stationary)

    def test_rate_cap(self, two_state):
        k = two_state.kernel
        with pytest.raises(RateCapExceeded):
            kl_rate(k, k, two_state.stationary, rate_cap=0.01)


class TestReferenceChain:
    def test_reference_kernel_carries_the_flux(self, path3):
        capacity = capacity_from_kernel(path3.kernel, path3.stationary)
        flux = Flux(path3.graph, [0.02, -0.03])
        q = reference_kernel(path3.kernel, capacity, flux)
        pi = path3.stationary.values
        fwd, bwd = q.edge_rates()
        xs, ys = path3.graph.edges[:, 0], path3.graph.edges[:, 1]
        assert pi[xs] * fwd - pi[ys] * bwd == pytest.approx(flux.values)

    def test_marginals_follow_the_curve(self):
        problem = IsingAnnealing(4, 1.0, StateSpace.FULL)
        chain = ReferenceChain(problem.curve(21), problem.kernel)
        checkpoints = [0.25, 0.5, 1.0]
        for s, mu in zip(checkpoints, chain.marginals(checkpoints)):
            assert np.abs(mu.values - problem.measure(s).values).max() < 1e-6

    def test_path_kl_within_quarter_action(self):
        problem = IsingAnnealing(4, 1.0)
        curve = problem.curve(41)
        value, _ = ReferenceChain(curve, problem.kernel).path_kl_to_annealing()
        assert value <= action(curve).value / 4.0 * (1 + 1e-3)
