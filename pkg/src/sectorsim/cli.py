"""Command-line interface.

One subcommand per invocation:

    simulate   run a single trace on a scenario file
    sweep      run the full placement sweep from an experiment config
    oracle     exhaustive optimum of a scenario
    census     exhaustive landscape statistics, with analytical predictions
    theory     analytical landscape predictions from (sensors, states) alone

Exit status: 0 success, 1 usage error, 2 domain error (malformed input
file, enumeration budget exceeded, invalid parameter combination).
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from typing import Optional

import numpy as np

from . import __version__
from .bidding import (
    FIXED,
    MARGINAL,
    BidPolicy,
    RoundConfig,
    run_protocol,
)
from .experiment import (
    ExperimentConfig,
    load_experiment_config,
    run_sweep,
    summarize,
    write_histogram_csv,
    write_placement_summary_csv,
    write_summary_csv,
    write_traces_csv,
)
from .model import (
    OFF,
    Scenario,
    ScenarioFormatError,
    default_start,
    load_scenario,
)
from .oracle import EnumerationBudgetError, census_report, enumerate_optimum
from .search import global_hill_climb, individual_hill_climb_run
from .theory import theory_report, theory_report_to_dict

_MAX_PRINTED_MAXIMIZERS = 10


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage problems; the contract here is 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _state_label(state: int) -> str:
    return "off" if state == OFF else str(state)


def _format_allocation(allocation) -> str:
    return " ".join(_state_label(s) for s in allocation)


def _optimum_if_tractable(scenario: Scenario) -> Optional[int]:
    """Optimum GU when enumeration fits the default budget, else None."""
    try:
        return enumerate_optimum(scenario).optimum_gu
    except EnumerationBudgetError:
        return None


# --- simulate -----------------------------------------------------------------


def _write_single_trace(path: str, gu_values, alphas) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("round,gu,alpha\n")
        for i, gu in enumerate(gu_values):
            alpha_text = "" if alphas is None else f"{alphas[i]:.6f}"
            fh.write(f"{i},{gu},{alpha_text}\n")


def _cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    start = default_start(scenario)
    os.makedirs(args.out, exist_ok=True)
    trace_path = os.path.join(args.out, "trace.csv")

    optimum = _optimum_if_tractable(scenario)
    alpha_of = None
    if optimum is not None and optimum > 0:
        alpha_of = lambda gu: gu / optimum  # noqa: E731

    if args.algorithm == "bidding":
        policy = BidPolicy(
            mode=args.bid_mode, neighbor_count=args.k, amount=args.bid_amount
        )
        round_config = RoundConfig(miss_probability=args.miss_prob)
        trace = run_protocol(
            scenario,
            start,
            policy,
            round_config,
            rng_seed=np.random.default_rng(args.seed),
            optimum_gu=optimum if alpha_of else None,
        )
        gu_values = [record.gu for record in trace.records]
        final_allocation = trace.final_allocation
        rounds = trace.rounds_executed
        converged = trace.converged
    else:
        runner = (
            global_hill_climb
            if args.algorithm == "global-hc"
            else individual_hill_climb_run
        )
        outcome = runner(scenario, start, rng_seed=args.seed)
        gu_values = list(outcome.gu_trace)
        final_allocation = outcome.final_allocation
        rounds = outcome.steps
        converged = outcome.converged

    alphas = [alpha_of(gu) for gu in gu_values] if alpha_of else None
    _write_single_trace(trace_path, gu_values, alphas)

    print(f"algorithm: {args.algorithm}")
    print(
        f"scenario: {args.scenario} "
        f"({len(scenario.sensors)} sensors, {len(scenario.targets)} targets)"
    )
    steps_word = "rounds" if args.algorithm == "bidding" else "steps"
    print(f"{steps_word}: {rounds} ({'converged' if converged else 'cap reached'})")
    print(f"final allocation: {_format_allocation(final_allocation)}")
    print(f"final GU: {gu_values[-1]}")
    if alpha_of:
        print(f"optimum GU: {optimum} (alpha = {alpha_of(gu_values[-1]):.6f})")
    elif optimum is not None:
        print(f"optimum GU: {optimum} (alpha undefined, optimum not positive)")
    else:
        print("optimum GU: skipped (state space exceeds enumeration budget)")
    print(f"trace written: {trace_path}")
    return 0


# --- sweep ----------------------------------------------------------------


def _apply_overrides(config: ExperimentConfig, args) -> ExperimentConfig:
    """Flag overrides; every flag maps to exactly one config field, so
    passing a value equal to the file's is the identity."""
    updates = {}
    if args.seed is not None:
        updates["master_seed"] = args.seed
    if args.placements is not None:
        updates["placements"] = args.placements
    if args.runs is not None:
        updates["runs_per_placement"] = args.runs
    if args.ks is not None:
        updates["neighbor_counts"] = tuple(
            int(part) for part in args.ks.split(",") if part
        )
    if args.bid_mode is not None:
        updates["bid_mode"] = args.bid_mode
    if args.bid_amount is not None:
        updates["bid_amount"] = args.bid_amount
    if args.miss_prob is not None:
        updates["round_config"] = dataclasses.replace(
            config.round_config, miss_probability=args.miss_prob
        )
    if updates:
        config = dataclasses.replace(config, **updates)
    return config


def _cmd_sweep(args) -> int:
    config = _apply_overrides(load_experiment_config(args.config), args)
    result = run_sweep(config, workers=args.threads)

    os.makedirs(args.out, exist_ok=True)
    outputs = []
    for name, writer in (
        ("traces.csv", write_traces_csv),
        ("summary.csv", write_summary_csv),
        ("histogram.csv", write_histogram_csv),
        ("placement_summary.csv", write_placement_summary_csv),
    ):
        path = os.path.join(args.out, name)
        writer(result, path)
        outputs.append(path)
    if not args.no_plots:
        from .plots import render_report_figures

        outputs.extend(render_report_figures(result, args.out))

    print(
        f"sweep: {config.placements} placements x "
        f"{config.runs_per_placement} runs, k in {list(config.neighbor_counts)}"
    )
    excluded = result.excluded_placements
    if excluded:
        print(f"excluded placements (optimum not positive): {list(excluded)}")
    print(f"{'k':>3} {'mean_alpha':>11} {'frac_optimal':>13} {'mean_rounds':>12}")
    for row in summarize(result):
        print(
            f"{row.k:>3} {row.mean_alpha:>11.4f} "
            f"{row.frac_optimal:>13.4f} {row.mean_rounds:>12.2f}"
        )
    for path in outputs:
        print(f"written: {path}")
    return 0


# --- oracle / census / theory ----------------------------------------------


def _cmd_oracle(args) -> int:
    scenario = load_scenario(args.scenario)
    result = enumerate_optimum(scenario)
    print(f"{result.visited} allocations enumerated")
    print(f"optimum GU: {result.optimum_gu}")
    maximizers = result.optimum_allocations
    shown = maximizers[:_MAX_PRINTED_MAXIMIZERS]
    print(f"maximizers ({len(maximizers)}):")
    for allocation in shown:
        print(f"  {_format_allocation(allocation)}")
    if len(maximizers) > len(shown):
        print(f"  ... and {len(maximizers) - len(shown)} more")
    return 0


def _cmd_census(args) -> int:
    scenario = load_scenario(args.scenario)
    report = census_report(scenario)
    predicted = theory_report_to_dict(
        theory_report(
            num_sensors=len(scenario.sensors),
            num_states=scenario.num_states,
            total_allocations=report["total"],
        )
    )
    print(f"allocations: {report['total']}")
    print(f"optimum GU: {report['optimum_gu']}")
    print(f"local optima: {report['optima_count']}")
    print(f"empirical lambda: {report['lambda_empirical']:.8f}")
    distance = report["max_bfs_distance"]
    print(
        "max distance to a local optimum: "
        + ("unreachable (no local optima)" if distance is None else str(distance))
    )
    print("analytical predictions for comparison:")
    print(f"  branching factor b: {predicted['branching_factor']}")
    print(f"  predicted lambda: {predicted['lambda']:.8e}")
    print(f"  predicted local optima: {predicted['expected_local_optima']:.4f}")
    if predicted["expected_distance"] is not None:
        print(f"  predicted distance bound: {predicted['expected_distance']:.4f}")
    return 0


def _cmd_theory(args) -> int:
    report = theory_report(num_sensors=args.sensors, num_states=args.states)
    print(f"sensors: {args.sensors}")
    print(f"states per sensor: {args.states}")
    print(f"allocations: {report.total_allocations}")
    print(f"branching factor b: {report.branching_factor}")
    print(f"lambda: {float(report.lambda_):.8e}")
    # exact rational arithmetic: this product is the integer 1, not "almost 1"
    print(f"lambda * 2^b: {report.lambda_ * 2 ** report.branching_factor}")
    print(f"expected local optima: {float(report.expected_local_optima):.6f}")
    print(
        "pr(random local optimum is global): "
        f"{float(report.pr_local_is_global):.6f}"
    )
    if report.expected_distance is not None:
        print(f"expected distance bound: {report.expected_distance:.6f}")
    return 0


# --- parser ----------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(
        prog="sectorsim",
        description="Sensor-sector allocation: simulation and analysis.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    commands = parser.add_subparsers(
        dest="command", required=True, parser_class=_Parser
    )

    simulate = commands.add_parser(
        "simulate", help="run one trace on a scenario file"
    )
    simulate.add_argument("--scenario", required=True, help="scenario JSON file")
    simulate.add_argument(
        "--k",
        type=int,
        default=None,
        help="bids per target (bidding algorithm only)",
    )
    simulate.add_argument("--seed", type=int, default=0, help="RNG seed")
    simulate.add_argument(
        "--algorithm",
        choices=("bidding", "global-hc", "individual-hc"),
        default="bidding",
    )
    simulate.add_argument(
        "--bid-mode", choices=(FIXED, MARGINAL), default=FIXED
    )
    simulate.add_argument(
        "--miss-prob",
        type=float,
        default=0.0,
        help="probability a bid is not delivered",
    )
    simulate.add_argument("--bid-amount", type=int, default=1)
    simulate.add_argument("--out", default=".", help="output directory")
    simulate.set_defaults(handler=_cmd_simulate)

    sweep = commands.add_parser(
        "sweep", help="run the placement sweep from an experiment config"
    )
    sweep.add_argument("--config", required=True, help="experiment config JSON")
    sweep.add_argument("--out", default=".", help="output directory")
    sweep.add_argument(
        "--threads",
        type=int,
        default=os.cpu_count(),
        help="parallel workers over placements",
    )
    sweep.add_argument(
        "--no-plots", action="store_true", help="skip figure rendering"
    )
    sweep.add_argument("--seed", type=int, default=None, help="override master seed")
    sweep.add_argument("--placements", type=int, default=None)
    sweep.add_argument("--runs", type=int, default=None)
    sweep.add_argument(
        "--ks", default=None, help="override neighbor counts, e.g. 1,3,5,7"
    )
    sweep.add_argument("--bid-mode", choices=(FIXED, MARGINAL), default=None)
    sweep.add_argument("--bid-amount", type=int, default=None)
    sweep.add_argument("--miss-prob", type=float, default=None)
    sweep.set_defaults(handler=_cmd_sweep)

    oracle = commands.add_parser(
        "oracle", help="exhaustive optimum of a scenario"
    )
    oracle.add_argument("--scenario", required=True)
    oracle.set_defaults(handler=_cmd_oracle)

    census_cmd = commands.add_parser(
        "census", help="exhaustive landscape statistics of a scenario"
    )
    census_cmd.add_argument("--scenario", required=True)
    census_cmd.set_defaults(handler=_cmd_census)

    theory = commands.add_parser(
        "theory", help="analytical landscape predictions"
    )
    theory.add_argument("--sensors", type=int, required=True)
    theory.add_argument("--states", type=int, required=True)
    theory.set_defaults(handler=_cmd_theory)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if (
        args.command == "simulate"
        and args.algorithm == "bidding"
        and args.k is None
    ):
        parser.error("simulate: --k is required for the bidding algorithm")
    try:
        return args.handler(args)
    except ScenarioFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EnumerationBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
