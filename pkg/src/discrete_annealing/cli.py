"""Command-line frontend: ``discrete-annealing {action,anneal,verify,landscape}``.

Exit codes: 0 when the command's checks pass, 1 when an invariant or bound
fails, 2 on invalid input.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence

import numpy as np
from pydantic import ValidationError

from discrete_annealing.annealing.bounds import plan_run, verify_error_bound
from discrete_annealing.annealing.exact import run_exact
from discrete_annealing.annealing.problem import GibbsAnnealingProblem
from discrete_annealing.annealing.sampler import distribution_sampler, run_sampler
from discrete_annealing.config import RunConfig
from discrete_annealing.errors import AnnealingError, BoundViolation, SymmetryViolation
from discrete_annealing.ising.landscape import (
    classify_profile,
    landscape_classify,
    landscape_profile,
)
from discrete_annealing.ising.pipeline import IsingAnnealing, ising_pipeline
from discrete_annealing.markov.divergences import kl, tv_distance
from discrete_annealing.models import (
    AnnealConfig,
    CommandName,
    HorizonRule,
    ModelKind,
    OutputFormat,
    RunMode,
)
from discrete_annealing.potts.paths import check_low_temperature
from discrete_annealing.potts.pipeline import PottsAnnealing, potts_action
from discrete_annealing.potts.projected import diagonal_profile
from discrete_annealing.reports import write_csv, write_json
from discrete_annealing.suites import SUITES, run_suite
from discrete_annealing.transport.action import action

logger = logging.getLogger("discrete_annealing")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discrete-annealing",
        description="Action-controlled simulated annealing on finite state spaces.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML run configuration; flags override it")
    common.add_argument("--model", choices=[m.value for m in ModelKind])
    common.add_argument("--n", type=int)
    common.add_argument("--q", type=int)
    common.add_argument("--beta", type=float)
    common.add_argument("--eps", type=float)
    common.add_argument("--grid", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--output", help="Report path (default: stdout)")
    common.add_argument("--format", choices=[f.value for f in OutputFormat])

    sub.add_parser("action", parents=[common], help="Action of the annealing curve")

    anneal = sub.add_parser("anneal", parents=[common], help="Run the annealing algorithm")
    anneal.add_argument("--mode", choices=[m.value for m in RunMode])
    anneal.add_argument("--horizon", type=float)
    anneal.add_argument("--layers", type=int)
    anneal.add_argument("--replicates", type=int)
    anneal.add_argument("--max-jumps", dest="max_jumps", type=int)
    anneal.add_argument(
        "--horizon-rule", dest="horizon_rule", choices=[r.value for r in HorizonRule]
    )

    verify = sub.add_parser("verify", parents=[common], help="Run an invariant suite")
    verify.add_argument("suite", choices=sorted(SUITES))

    sub.add_parser("landscape", parents=[common], help="Shape of the projected measure")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    fields = set(RunConfig.model_fields) - {"command"}
    overrides = {k: v for k, v in vars(args).items() if k in fields and v is not None}
    overrides["command"] = args.command
    if args.config:
        return RunConfig.from_yaml(args.config, **overrides)
    return RunConfig.model_validate(overrides)


def _problem(config: RunConfig) -> GibbsAnnealingProblem:
    if config.model == ModelKind.ISING:
        return IsingAnnealing(config.n, config.beta)
    check_low_temperature(config.q, config.beta)
    return PottsAnnealing.reversed(config.n, config.q, config.beta, config.eps)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_action(config: RunConfig) -> int:
    out = config.resolve_output()
    if config.model == ModelKind.ISING:
        report = ising_pipeline(
            config.n, config.beta, config.eps, config.horizon_rule, config.grid, run=False
        )
        write_json(report, "ising-action", out)
        return EXIT_OK
    problem = _problem(config)
    report = potts_action(config.n, config.q, problem.schedule, config.grid)
    write_json(report, "potts-action", out)
    return EXIT_OK if report.holds else EXIT_FAILED


def cmd_anneal(config: RunConfig) -> int:
    problem = _problem(config)
    out = config.resolve_output()
    if config.mode == RunMode.EXACT:
        report = verify_error_bound(
            problem,
            config.eps,
            grid=config.grid,
            horizon_rule=config.horizon_rule,
            horizon=config.horizon,
            layers=config.layers,
        )
        write_json(report, "anneal-exact", out)
        return EXIT_OK if report.passed else EXIT_FAILED

    action_value = action(problem.curve(config.grid)).value
    horizon, layers = plan_run(
        problem, config.eps, action_value, config.horizon_rule, config.horizon, config.layers
    )
    run = AnnealConfig(
        horizon=horizon,
        layers=layers,
        seed=config.seed,
        replicates=config.replicates,
        max_jumps=config.max_jumps,
    )
    result = run_sampler(
        lambda s: problem.kernel(s).to_transition_matrix(),
        run,
        distribution_sampler(problem.initial().values),
    )
    counts = np.bincount(result.final_states, minlength=problem.graph.size)
    empirical = counts / counts.sum()
    target = problem.target()
    payload = {
        "config": run.model_dump(mode="json"),
        "result": result.model_dump(mode="json"),
        "counts": counts.tolist(),
        "empirical_tv": tv_distance(target, empirical),
        "exact_kl": kl(target, run_exact(problem.kernel, run, problem.initial())),
    }
    write_json(payload, "anneal-sample", out)
    return EXIT_OK


def cmd_verify(config: RunConfig) -> int:
    report = run_suite(config.suite, config)
    out = config.resolve_output()
    if config.format == OutputFormat.CSV:
        rows = [(c.name, c.passed, c.detail, f"{c.elapsed_s:.3f}") for c in report.checks]
        write_csv(["check", "passed", "detail", "elapsed_s"], rows, out)
    else:
        write_json(report, "suite", out)
    for check in report.checks:
        if not check.passed:
            logger.error("%s: %s", check.name, check.detail)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_landscape(config: RunConfig) -> int:
    out = config.resolve_output()
    if config.model == ModelKind.ISING:
        m, log_p = landscape_profile(config.n, config.beta, nonnegative=False)
        if config.format == OutputFormat.CSV:
            write_csv(["m", "log_pi", "pi"], zip(m, log_p, np.exp(log_p)), out)
        else:
            report = landscape_classify(config.n, config.beta)
            payload = report.model_dump(mode="json") | {"m": m.tolist(), "log_pi": log_p.tolist()}
            write_json(payload, "ising-landscape", out)
        return EXIT_OK

    ks, log_p = diagonal_profile(config.n, config.q, config.beta)
    if config.format == OutputFormat.CSV:
        write_csv(["k", "log_pi", "pi"], zip(ks, log_p, np.exp(log_p)), out)
    else:
        payload = {
            "n": config.n,
            "q": config.q,
            "beta": config.beta,
            "shape": classify_profile(log_p).value,
            "k": ks.tolist(),
            "log_pi": log_p.tolist(),
        }
        write_json(payload, "potts-landscape", out)
    return EXIT_OK


COMMANDS = {
    CommandName.ACTION: cmd_action,
    CommandName.ANNEAL: cmd_anneal,
    CommandName.VERIFY: cmd_verify,
    CommandName.LANDSCAPE: cmd_landscape,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        config = load_config(args)
        return COMMANDS[config.command](config)
    except (BoundViolation, SymmetryViolation) as exc:
        logger.error("%s", exc)
        return EXIT_FAILED
    except (ValidationError, AnnealingError, ValueError, FileNotFoundError) as exc:
        logger.error("%s", exc)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
