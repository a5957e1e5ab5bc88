import argparse
import json
import sys

import yaml

import config
from datasets.scenario import ScenarioError
from functions.evaluator import DistanceEvaluator
from functions.registry import ExampleRunner
from functions.simulator import Simulator
from functions.verifier import Verifier
from models.characteristics import ConvergenceError, WindowLimitError
from models.eventdriven import EventAccumulationError
from models.losses.flat import WeightKind
from options import fresh_options, reset_options, update_options


def _common_parser():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--options', help='experiment options file name', type=str)
    parser.add_argument('--dt', help='max node spacing of the characteristic curve (solver.dt_max)', type=float)
    parser.add_argument('--tol', help='fixed-point stopping tolerance (solver.fixpoint_tol)', type=float)
    parser.add_argument('--grid', help='grid size of the flat-norm LP (metric.grid_n)', type=int)
    parser.add_argument('--oracle', help='use the event-driven solver', action='store_true')
    parser.add_argument('--seed', help='seed of the randomized scenarios', type=int)
    parser.add_argument('--out', help='output file, relative names go to the output directory', type=str)
    parser.add_argument('--name', help='experiment name (log sub-directory)', type=str)
    parser.add_argument('--version', help='version of task (timestamp by default)', type=str)
    parser.add_argument('--workdir', help='root for logs, summaries and outputs', type=str)
    return parser


def parse_args(argv):
    common = _common_parser()
    parser = argparse.ArgumentParser(description='Re-entrant factory flow simulator')
    subparsers = parser.add_subparsers(dest='command', required=True)

    simulate = subparsers.add_parser('simulate', parents=[common], help='time series of xi, W, Y')
    simulate.add_argument('--scenario', required=True, type=str)

    state = subparsers.add_parser('state', parents=[common], help='measure snapshot at time t')
    state.add_argument('--scenario', required=True, type=str)
    state.add_argument('--t', required=True, type=float)

    distance = subparsers.add_parser('distance', parents=[common], help='weighted flat distance of two measures')
    distance.add_argument('--a', required=True, type=str, help='snapshot or scenario file')
    distance.add_argument('--b', required=True, type=str, help='snapshot or scenario file')
    distance.add_argument('--weight', default=WeightKind.UNIT.value, choices=[w.value for w in WeightKind])
    distance.add_argument('--t', type=float, help='compare scenario states at this time instead of rho0')

    verify = subparsers.add_parser('verify', parents=[common], help='weak-form residual report')
    verify.add_argument('--scenario', required=True, type=str)

    exits = subparsers.add_parser('exit-times', parents=[common], help='exit ledger of every atom')
    exits.add_argument('--scenario', required=True, type=str)

    examples = subparsers.add_parser('examples', parents=[common], help='run the built-in examples')
    examples.add_argument('names', nargs='*', help='subset of examples (all by default)')
    examples.add_argument('--random', default=0, type=int, help='also compare N random scenarios with the oracle')

    return parser.parse_args(argv)


def flag_overrides(args):
    """Solver / metric flags, applied on top of a scenario's own blocks"""
    solver = {k: v for k, v in (("dt_max", args.dt), ("fixpoint_tol", args.tol)) if v is not None}
    metric = {"grid_n": args.grid} if args.grid is not None else {}
    return {"solver": solver, "metric": metric}


def dispatch(args, options, logger, writer):
    overrides = flag_overrides(args)
    if args.command == 'simulate':
        Simulator(options, logger, writer, scenario=args.scenario, overrides=overrides).simulate(args.out)
    elif args.command == 'state':
        Simulator(options, logger, writer, scenario=args.scenario, overrides=overrides).state(args.t, args.out)
    elif args.command == 'exit-times':
        Simulator(options, logger, writer, scenario=args.scenario, overrides=overrides).exit_times(args.out)
    elif args.command == 'distance':
        value = DistanceEvaluator(options, logger, writer, overrides=overrides).evaluate(args.a, args.b, args.weight,
                                                                                        args.t)
        print(config.FLOAT_FMT % value)
    elif args.command == 'verify':
        passed, _ = Verifier(options, logger, writer, scenario=args.scenario, overrides=overrides).verify(args.out)
        return config.EXIT_OK if passed else config.EXIT_CHECK_FAILED
    elif args.command == 'examples':
        passed, _ = ExampleRunner(options, logger, writer, overrides=overrides).run(args.names, args.out,
                                                                                    args.random)
        print("examples: %s" % ("pass" if passed else "FAIL"))
        return config.EXIT_OK if passed else config.EXIT_CHECK_FAILED
    return config.EXIT_OK


def run_command(argv):
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return config.EXIT_OK if not e.code else config.EXIT_INPUT_ERROR

    options = fresh_options()
    try:
        if args.options is not None:
            update_options(args.options, options)
    except (OSError, ValueError, yaml.YAMLError) as e:
        print("invalid options file %s: %s" % (args.options, e), file=sys.stderr)
        return config.EXIT_INPUT_ERROR

    logger, writer = reset_options(options, args, phase=args.command)
    try:
        return dispatch(args, options, logger, writer)
    except ScenarioError as e:
        logger.error("invalid scenario: %s" % e)
    except (OSError, json.JSONDecodeError) as e:
        logger.error("cannot read input: %s" % e)
    except (ConvergenceError, WindowLimitError, EventAccumulationError) as e:
        logger.error("solver failed: %s" % e)
        return config.EXIT_CHECK_FAILED
    except ValueError as e:
        logger.error("invalid input: %s" % e)
    finally:
        writer.close()
    return config.EXIT_INPUT_ERROR


def main():
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
