"""Command-line front end.

Subcommands: solve, oracle, sweep-avg, sweep-max, validate, example, render.
Exit codes are stable: 0 success (or a passing validation), 1 generic failure
(including a failing validation), 2 infeasible instance, 3 parse/validation
error (bad flags count too), 4 problem size over a hard cap.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict

from . import instance_io, plots, sweeps
from .errors import (
    BeamselectError,
    ConvergenceError,
    DegenerateDistributionError,
    GeometryError,
    InfeasibleError,
    InputError,
    ModelError,
    ParseError,
    SizeError,
    ValidationError,
)
from .gain_model import expected_gain, gain_stats, gain_variance
from .montecarlo import validate_closed_forms
from .selection import Instance, brute_force_oracle, double_loop_greedy, greedy
from .submodular import DSConfig, SSPConfig, difference_of_submodular

_PARSE_ERRORS = (ParseError, ValidationError, InputError, ModelError,
                 GeometryError, DegenerateDistributionError)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INFEASIBLE = 2
EXIT_PARSE = 3
EXIT_SIZE = 4


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors, which collides with the
    # infeasible exit code; route usage problems through the parse-error path
    def error(self, message):
        raise ParseError(message)


def _add_problem_flags(parser):
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--instance", metavar="PATH",
                        help="instance document with gammas and threshold")
    source.add_argument("--scenario", metavar="PATH",
                        help="scenario document with geometry and threshold_beta")
    parser.add_argument("--gamma-threshold", type=float, default=None,
                        metavar="REAL", help="override the expected-gain threshold")


def _add_ds_flags(parser):
    parser.add_argument("--lambda0", type=float, default=1.0, metavar="REAL",
                        help="initial relaxation weight (default 1)")
    parser.add_argument("--alpha", type=float, default=2.0, metavar="REAL",
                        help="relaxation weight multiplier (default 2)")


def _load_problem(args) -> Instance:
    if args.instance is not None:
        instance = instance_io.load_instance(args.instance)
    else:
        instance = instance_io.scenario_to_instance(
            instance_io.load_scenario(args.scenario))
    if args.gamma_threshold is not None:
        instance = Instance(gammas=instance.gammas, threshold=args.gamma_threshold)
    return instance


def _ds_config(args) -> DSConfig:
    return DSConfig(lambda0=args.lambda0, alpha=args.alpha,
                    ssp=SSPConfig(permutation_seed=args.seed))


def _print_result(result, threshold: float):
    doc = {
        "algorithm": result.algorithm,
        "subset": ",".join(str(i) for i in result.subset),
        "subset_indices": list(result.subset),
        "expected_gain": result.stats.mean,
        "variance": result.stats.variance,
        "threshold": threshold,
        "diagnostics": asdict(result.diagnostics),
    }
    print(json.dumps(doc, indent=2))
    return doc


def _cmd_solve(args) -> int:
    instance = _load_problem(args)
    if args.algorithm == "greedy":
        result = greedy(instance)
    elif args.algorithm == "dlg":
        result = double_loop_greedy(instance)
    elif args.algorithm == "ds":
        result = difference_of_submodular(instance, _ds_config(args))
    else:
        result = brute_force_oracle(instance)
    doc = _print_result(result, instance.threshold)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            json.dump(doc, handle, indent=2)
            handle.write("\n")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    args.algorithm = "oracle"
    return _cmd_solve(args)


def _summary_csv(summaries, aggregate: str) -> str:
    column = "mean_sr" if aggregate == "avg" else "max_sr"
    lines = [f"n,gamma_max,beta,algorithm,instances,{column}"]
    for cell in summaries:
        value = cell.mean_sr if aggregate == "avg" else cell.max_sr
        lines.append(f"{cell.n},{cell.gamma_max:g},{cell.beta:g},"
                     f"{cell.algorithm},{cell.instances},{value!r}")
    return "\n".join(lines)


def _run_sweep_command(args, aggregate: str) -> int:
    if aggregate == "avg":
        n_values = range(4, 11) if args.full else range(4, 9)
        gamma_values = (1.0, 11.0, 21.0, 31.0, 41.0, 51.0) if args.full \
            else (1.0, 21.0, 41.0)
        beta_values = (0.6,)
        default_out = "sweep_avg.csv"
    else:
        n_values = range(4, 11) if args.full else range(4, 9)
        gamma_values = (30.0,)
        beta_values = (0.5, 0.6, 0.7, 0.8, 0.9, 1.0) if args.full \
            else (0.5, 0.7, 0.9)
        default_out = "sweep_max.csv"
    instances = args.instances
    if instances is None:
        instances = 1000 if args.full else 100
    spec = instance_io.SweepSpec(
        n_values=tuple(n_values),
        gamma_max_values=gamma_values,
        beta_values=beta_values,
        instances_per_cell=instances,
        base_seed=args.seed,
        ds_config=DSConfig(ssp=SSPConfig(permutation_seed=args.seed)),
    )
    records = sweeps.run_sweep(spec)
    out = args.out or default_out
    instance_io.save_result(out, records)
    summaries = sweeps.summarize(records)
    print(_summary_csv(summaries, aggregate))
    sweeps.soft_claim_violations(summaries, aggregate, spec.base_seed)
    print(f"wrote {len(records)} records to {out}", file=sys.stderr)
    return EXIT_OK


def _cmd_validate(args) -> int:
    instance = _load_problem(args)
    subset = range(1, instance.n + 1)
    passed, report = validate_closed_forms(
        instance.gammas, subset, args.samples, args.seed)
    closed_mean = expected_gain(instance.gammas, subset)
    closed_var = gain_variance(instance.gammas, subset)
    print(f"samples          {report.samples}")
    print(f"closed-form mean {closed_mean!r}")
    print(f"sample mean      {report.sample_mean!r} "
          f"(stderr {report.mean_stderr:.3e})")
    print(f"closed-form var  {closed_var!r}")
    print(f"sample var       {report.sample_variance!r} "
          f"(stderr {report.variance_stderr:.3e})")
    print("PASS: closed forms within 4 standard errors" if passed
          else "FAIL: sample statistics outside 4 standard errors")
    return EXIT_OK if passed else EXIT_FAIL


def _cmd_example(args) -> int:
    gammas = (0.4, 0.6, 3.0, 5.0)
    threshold = 3.3
    print(f"four-agent instance: gammas = {gammas}, threshold = {threshold}")
    print("  subset       expected gain   variance")
    labels = [("S1", (1, 2, 3)), ("S2", (1, 2, 4)), ("S3", (1, 3, 4)),
              ("S4", (2, 3, 4)), ("full", (1, 2, 3, 4))]
    for label, subset in labels:
        stats = gain_stats(gammas, subset)
        name = "{" + ",".join(str(i) for i in subset) + "}"
        print(f"  {label:<4} {name:<12} {stats.mean:9.4f} {stats.variance:11.4f}")
    pair = expected_gain(gammas, (1, 2))
    print(f"  E[G({{1,2}})] = {pair:.4f} < {threshold}, "
          "so two agents are not enough")
    instance = Instance(gammas=gammas, threshold=threshold)
    for result in (greedy(instance), double_loop_greedy(instance),
                   brute_force_oracle(instance)):
        name = "{" + ",".join(str(i) for i in result.subset) + "}"
        print(f"  {result.algorithm:<7} -> {name:<10} "
              f"(E = {result.stats.mean:.4f}, Var = {result.stats.variance:.4f})")
    print()
    flip = (1.0, 2.0, 11.0, 12.0, 13.0)
    print(f"five-agent threshold flip: gammas = {flip}")
    for threshold in (2.4, 2.5):
        result = brute_force_oracle(Instance(gammas=flip, threshold=threshold))
        name = "{" + ",".join(str(i) for i in result.subset) + "}"
        print(f"  threshold {threshold} -> oracle {name:<10} "
              f"(E = {result.stats.mean:.4f}, Var = {result.stats.variance:.4f})")
    return EXIT_OK


def _cmd_render(args) -> int:
    paths = plots.render_charts(args.csv, args.out or ".")
    for path in paths:
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="beamselect",
                     description="subset selection for distributed beamforming "
                                 "under Gaussian localization error")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run one selection algorithm")
    _add_problem_flags(solve)
    solve.add_argument("--algorithm", choices=("greedy", "dlg", "ds", "oracle"),
                       default="greedy")
    _add_ds_flags(solve)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--out", metavar="PATH", default=None,
                       help="also write the result document here")
    solve.set_defaults(func=_cmd_solve)

    oracle = sub.add_parser("oracle", help="run the exhaustive oracle")
    _add_problem_flags(oracle)
    _add_ds_flags(oracle)
    oracle.add_argument("--seed", type=int, default=0)
    oracle.add_argument("--out", metavar="PATH", default=None)
    oracle.set_defaults(func=_cmd_oracle)

    for name, aggregate in (("sweep-avg", "avg"), ("sweep-max", "max")):
        sweep = sub.add_parser(
            name, help=f"replicate the {aggregate}-SR sweep at reduced scale")
        sweep.add_argument("--seed", type=int, default=0)
        sweep.add_argument("--out", metavar="PATH", default=None,
                           help="records file (.csv or .json)")
        sweep.add_argument("--full", action="store_true",
                           help="full-scale grid (1000 instances per cell)")
        sweep.add_argument("--instances", type=int, default=None,
                           help="override instances per cell")
        sweep.set_defaults(func=lambda a, agg=aggregate: _run_sweep_command(a, agg))

    validate = sub.add_parser("validate",
                              help="check closed forms against Monte Carlo")
    _add_problem_flags(validate)
    validate.add_argument("--samples", type=int, default=1_000_000)
    validate.add_argument("--seed", type=int, default=0)
    validate.set_defaults(func=_cmd_validate)

    example = sub.add_parser("example", help="print the worked instances")
    example.set_defaults(func=_cmd_example)

    render = sub.add_parser("render", help="render charts from sweep records")
    render.add_argument("csv", help="records file written by a sweep command")
    render.add_argument("--out", metavar="DIR", default=None,
                        help="output directory (default: current)")
    render.set_defaults(func=_cmd_render)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except _PARSE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ConvergenceError, BeamselectError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
