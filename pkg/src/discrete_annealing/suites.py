"""Invariant suites run by ``discrete-annealing verify``.

Every suite is a list of named checks on random or model instances at desk
scale. A check passes or fails with a one-line detail; errors raised by the
library count as failures.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Callable

import numpy as np
from scipy.linalg import expm

from discrete_annealing.annealing.schedule import Schedule
from discrete_annealing.config import RunConfig
from discrete_annealing.errors import AnnealingError
from discrete_annealing.girsanov.path_kl import discrete_path_kl, path_kl
from discrete_annealing.girsanov.reference import ReferenceChain
from discrete_annealing.graph.analysis import CapacityAnalyzer
from discrete_annealing.graph.measures import MassRate, ProbVector
from discrete_annealing.graph.state_graph import StateGraph
from discrete_annealing.ising.landscape import classify_profile, landscape_classify
from discrete_annealing.ising.model import folding_projection, magnetization_projection
from discrete_annealing.ising.pipeline import IsingAnnealing
from discrete_annealing.ising.projected import ProjectedIsingChain
from discrete_annealing.markov.divergences import chi2, kl
from discrete_annealing.markov.inequalities import (
    canonical_paths_congestion,
    mlsi_constant,
    poincare_constant,
)
from discrete_annealing.markov.kernel import RateKernel, ReversiblePair
from discrete_annealing.models import (
    CheckResult,
    LandscapeShape,
    ModelKind,
    StateSpace,
    SuiteReport,
)
from discrete_annealing.potts.flux import greedy_flux
from discrete_annealing.potts.model import sorted_projection
from discrete_annealing.potts.paths import check_all_paths
from discrete_annealing.potts.pipeline import PottsAnnealing
from discrete_annealing.potts.projected import diagonal_profile
from discrete_annealing.symmetry.projection import Projection
from discrete_annealing.symmetry.verify import compare_metric_derivative
from discrete_annealing.transport.action import action
from discrete_annealing.transport.potential import (
    flux_cost,
    metric_derivative_sq,
    solve_continuity_potential,
    wc2_distance,
)

logger = logging.getLogger(__name__)

CheckFn = Callable[[], tuple[bool, str]]
SuiteFn = Callable[[RunConfig], list[CheckResult]]

SHAPED = {
    LandscapeShape.INCREASING,
    LandscapeShape.DECREASING,
    LandscapeShape.UNIMODAL,
    LandscapeShape.CONSTANT,
}


def random_reversible_pair(
    rng: np.random.Generator, size: int, chords: int | None = None
) -> ReversiblePair:
    """Connected random graph with random pi and capacities, exit rates at most 1."""
    order = rng.permutation(size)
    edges = {(int(a), int(b)) for a, b in zip(order[:-1], order[1:])}
    for _ in range(size if chords is None else chords):
        a, b = rng.choice(size, 2, replace=False)
        edges.add((int(a), int(b)))
    graph = StateGraph(list(range(size)), edges)
    pi = ProbVector.normalized(rng.uniform(0.2, 1.0, size))
    c = rng.uniform(0.1, 1.0, graph.num_edges)
    xs, ys = graph.edges[:, 0], graph.edges[:, 1]
    off = np.zeros((size, size))
    off[xs, ys] = c / pi.values[xs]
    off[ys, xs] = c / pi.values[ys]
    off /= max(1.0, off.sum(axis=1).max())
    return ReversiblePair(RateKernel.from_off_diagonal(graph, off), pi)


def random_measure(rng: np.random.Generator, size: int) -> ProbVector:
    return ProbVector.normalized(rng.uniform(0.05, 1.0, size))


def _check(name: str, fn: CheckFn) -> CheckResult:
    start = time.perf_counter()
    try:
        passed, detail = fn()
    except AnnealingError as exc:
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    logger.info("check %s: %s (%.2fs)", name, "pass" if passed else "FAIL", elapsed)
    return CheckResult(name=name, passed=bool(passed), detail=detail, elapsed_s=elapsed)


# ---------------------------------------------------------------------------
# Transport
# ---------------------------------------------------------------------------


def metric_axioms(config: RunConfig) -> list[CheckResult]:
    rng = np.random.default_rng(config.seed)

    def run() -> tuple[bool, str]:
        worst_triangle, worst_symmetry = 0.0, 0.0
        for _ in range(20):
            pair = random_reversible_pair(rng, 4)
            mu, nu, sigma = (random_measure(rng, 4) for _ in range(3))

            def dist(a: ProbVector, b: ProbVector) -> float:
                return wc2_distance(pair.graph, pair.capacity, a, b)

            if dist(mu, mu) > 1e-8 or dist(mu, nu) <= 0.0:
                return False, "identity of indiscernibles fails"
            worst_symmetry = max(worst_symmetry, abs(dist(mu, nu) - dist(nu, mu)))
            worst_triangle = max(worst_triangle, dist(mu, sigma) - dist(mu, nu) - dist(nu, sigma))
        ok = worst_triangle <= 1e-9 and worst_symmetry <= 1e-12
        return ok, f"triangle slack {worst_triangle:.2e}, symmetry gap {worst_symmetry:.2e}"

    return [_check("wc2 metric axioms on 20 random 4-state instances", run)]


def duality(config: RunConfig) -> list[CheckResult]:
    rng = np.random.default_rng(config.seed)

    def run() -> tuple[bool, str]:
        worst = 0.0
        for _ in range(200):
            pair = random_reversible_pair(rng, int(rng.integers(2, 31)))
            rate = MassRate.between(pair.stationary, random_measure(rng, pair.graph.size))
            psi = solve_continuity_potential(pair.graph, pair.capacity, rate, pair.stationary)
            potential_form = float(
                np.sum(pair.capacity.weights * psi.edge_differences(pair.graph) ** 2)
            )
            flux_form, _ = metric_derivative_sq(
                pair.graph, pair.capacity, rate, pair.stationary
            )
            worst = max(worst, abs(potential_form - flux_form) / max(flux_form, 1e-300))
        return worst <= 1e-10, f"max relative gap {worst:.2e}"

    return [_check("potential and flux forms agree on 200 instances", run)]


def transport_variance(config: RunConfig) -> list[CheckResult]:
    rng = np.random.default_rng(config.seed)

    def run() -> tuple[bool, str]:
        worst = 0.0
        for _ in range(20):
            pair = random_reversible_pair(rng, int(rng.integers(3, 9)))
            c_pi = poincare_constant(pair)
            for _ in range(100):
                mu = random_measure(rng, pair.graph.size)
                w2 = wc2_distance(pair.graph, pair.capacity, mu, pair.stationary) ** 2
                worst = max(worst, w2 / (c_pi * chi2(mu, pair.stationary)))
        return worst <= 1.0 + 1e-9, f"max W^2 / (C_PI chi^2) = {worst:.4f}"

    return [_check("W^2 <= C_PI chi^2 on 20 instances x 100 measures", run)]


def transport_entropy(config: RunConfig) -> list[CheckResult]:
    rng = np.random.default_rng(config.seed)

    def run() -> tuple[bool, str]:
        worst = 0.0
        for _ in range(5):
            pair = random_reversible_pair(rng, 3)
            estimate = mlsi_constant(pair, resolution=120)
            c_mlsi = estimate.value + estimate.error
            for _ in range(100):
                mu = random_measure(rng, 3)
                density = float(np.max(mu.values / pair.stationary.values))
                w2 = wc2_distance(pair.graph, pair.capacity, mu, pair.stationary) ** 2
                worst = max(worst, w2 / (4.0 * c_mlsi * density * kl(mu, pair.stationary)))
        return worst <= 1.0 + 1e-9, f"max W^2 / (4 C_MLSI |dmu/dpi| KL) = {worst:.4f}"

    return [_check("transport-entropy on 3-state instances", run)]


# ---------------------------------------------------------------------------
# Path measures
# ---------------------------------------------------------------------------


def girsanov(config: RunConfig) -> list[CheckResult]:
    rng = np.random.default_rng(config.seed)

    def run() -> tuple[bool, str]:
        ratios = []
        for _ in range(10):
            p = random_reversible_pair(rng, 4).kernel
            graph = p.graph
            q = RateKernel.from_edge_rates(
                graph,
                rng.uniform(0.1, 0.5, graph.num_edges),
                rng.uniform(0.1, 0.5, graph.num_edges),
            )
            mu0 = random_measure(rng, 4)

            def marginal(t: float, p: RateKernel = p, mu0: ProbVector = mu0) -> ProbVector:
                return ProbVector.normalized(mu0.values @ expm(t * p.rates))

            exact = path_kl(lambda t, p=p: p, lambda t, q=q: q, marginal, 0.0, 1.0, grid=401)
            errors = [
                abs(discrete_path_kl(lambda t, p=p: p, lambda t, q=q: q, mu0, 0.0, 1.0, k) - exact)
                for k in (100, 1000, 10000)
            ]
            ratios += [errors[0] / errors[1], errors[1] / errors[2]]
        ok = all(8.0 <= r <= 12.0 for r in ratios)
        return ok, f"error ratios in [{min(ratios):.2f}, {max(ratios):.2f}]"

    return [_check("Euler chain KL converges at first order", run)]


def reference_chain(config: RunConfig) -> list[CheckResult]:
    def run() -> tuple[bool, str]:
        problem = IsingAnnealing(5, 1.0, space=StateSpace.FULL)
        curve = problem.curve(21)
        chain = ReferenceChain(curve, problem.kernel)
        checkpoints = np.linspace(0.1, 1.0, 10)
        marginals = chain.marginals(checkpoints)
        worst = max(
            float(np.max(np.abs(mu.values - curve.measure(float(s)).values)))
            for mu, s in zip(marginals, checkpoints)
        )
        return worst <= 1e-6, f"max marginal deviation {worst:.2e}"

    return [_check("reference chain reproduces the Ising n=5 curve", run)]


# ---------------------------------------------------------------------------
# Symmetry and models
# ---------------------------------------------------------------------------


def _projection_gaps(problem: IsingAnnealing | PottsAnnealing, proj: Projection) -> float:
    curve = problem.curve(11)
    worst = 0.0
    for s in curve.grid:
        pi = problem.measure(float(s))
        kernel = problem.kernel_for(pi)
        full = ReversiblePair(kernel, pi)
        projected = ReversiblePair(proj.lump_kernel(kernel, pi), proj.project_measure(pi))
        report = compare_metric_derivative(proj, full, projected, curve.mass_rate(float(s)))
        worst = max(worst, report.gap)
    return worst


def symmetry(config: RunConfig) -> list[CheckResult]:
    checks = []
    if config.model == ModelKind.POTTS:
        n, q = config.n, config.q

        def run_potts() -> tuple[bool, str]:
            problem = PottsAnnealing(n, q, Schedule.linear_up(config.beta), space=StateSpace.FULL)
            gap = _projection_gaps(problem, sorted_projection(n, q))
            return gap <= 1e-8, f"max relative gap {gap:.2e}"

        checks.append(_check(f"potts n={n} q={q} full vs folded", run_potts))
        return checks

    n = config.n
    for beta in (0.5, 1.0, 1.5):
        for name, proj in (
            ("projected", magnetization_projection(n)),
            ("folded", folding_projection(n)),
        ):

            def run(beta: float = beta, proj: Projection = proj) -> tuple[bool, str]:
                gap = _projection_gaps(IsingAnnealing(n, beta, space=StateSpace.FULL), proj)
                return gap <= 1e-8, f"max relative gap {gap:.2e}"

            checks.append(_check(f"ising n={n} beta={beta} full vs {name}", run))
    return checks


def landscape(config: RunConfig) -> list[CheckResult]:
    def ising() -> tuple[bool, str]:
        bad = [
            (n, float(beta))
            for n in range(2, 61)
            for beta in np.linspace(0.0, 3.0, 25)
            if not landscape_classify(n, float(beta)).consistent
        ]
        return not bad, f"{len(bad)} inconsistent (n, beta)" + (f", first {bad[0]}" if bad else "")

    def potts() -> tuple[bool, str]:
        bad = []
        for n, q in ((8, 3), (6, 4)):
            for beta in np.linspace(q / 2.0, q / 2.0 + 3.0, 13):
                _, log_p = diagonal_profile(n, q, float(beta))
                if classify_profile(log_p) not in SHAPED:
                    bad.append((n, q, float(beta)))
        return not bad, f"{len(bad)} diagonal slices with two peaks"

    return [
        _check("ising landscape trichotomy for n <= 60", ising),
        _check("potts diagonal slices are unimodal", potts),
    ]


def greedy_flux_suite(config: RunConfig) -> list[CheckResult]:
    rng = np.random.default_rng(config.seed)

    def plans() -> tuple[bool, str]:
        pair = random_reversible_pair(rng, 20)
        paths = CapacityAnalyzer(pair.capacity).shortest_paths()
        failures, worst = 0, 0.0
        for _ in range(500):
            d = rng.normal(size=20)
            d[rng.random(20) < 0.3] = 0.0
            d -= d.mean()
            flux, plan = greedy_flux(pair.graph, d, paths)
            failures += bool(plan.violations(d))
            worst = max(worst, float(np.abs(d + flux.divergence().values).max()))
        return failures == 0 and worst <= 1e-12, f"{failures} bad plans, residual {worst:.1e}"

    def paths() -> tuple[bool, str]:
        found = check_all_paths(8, 3, 1.5) + check_all_paths(6, 4, 2.0)
        return not found, found[0] if found else "all sorted states"

    return [
        _check("greedy plan properties on 500 random D", plans),
        _check("potts path guarantees at (8, 3) and (6, 4)", paths),
    ]


def canonical_paths(config: RunConfig) -> list[CheckResult]:
    def run() -> tuple[bool, str]:
        bad = []
        for n in (4, 8, 16):
            for beta in (0.0, 0.5, 1.0, 1.5, 2.0, 4.0):
                chain = ProjectedIsingChain(n, beta, folded=True)
                pair = ReversiblePair(chain.kernel, chain.measure)
                congestion = canonical_paths_congestion(pair, chain.canonical_paths())
                c_pi = poincare_constant(pair)
                if not c_pi * (1.0 - 1e-9) <= congestion <= n**3:
                    bad.append((n, beta))
        return not bad, f"{len(bad)} violations" + (f", first {bad[0]}" if bad else "")

    return [_check("C_PI <= congestion <= n^3 on folded Ising chains", run)]


def action_bound(config: RunConfig) -> list[CheckResult]:
    checks = []
    for n in (4, 8, 16, 32):
        for beta in (0.5, 1.0, 2.0):

            def run(n: int = n, beta: float = beta) -> tuple[bool, str]:
                problem = IsingAnnealing(n, beta)
                value = action(problem.curve(51)).value
                bound = problem.action_bound()
                return value <= bound, f"ratio {value / bound:.3e}"

            checks.append(_check(f"ising action n={n} beta={beta}", run))
    return checks


SUITES: dict[str, SuiteFn] = {
    "metric-axioms": metric_axioms,
    "duality": duality,
    "transport-variance": transport_variance,
    "transport-entropy": transport_entropy,
    "girsanov": girsanov,
    "reference-chain": reference_chain,
    "symmetry": symmetry,
    "landscape": landscape,
    "greedy-flux": greedy_flux_suite,
    "canonical-paths": canonical_paths,
    "action-bound": action_bound,
}


def run_suite(name: str, config: RunConfig) -> SuiteReport:
    try:
        suite = SUITES[name]
    except KeyError:
        raise ValueError(f"Unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
    return SuiteReport(suite=name, checks=suite(config))
