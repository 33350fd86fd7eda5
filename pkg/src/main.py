#!/usr/bin/env python3
"""
symfinsler - Checks for locally symmetric polynomial Finsler metrics.

Decides positive definiteness of symmetric fourth-root metrics in two and
three dimensions, reproduces the n-interval table, verifies surface curvature
of second-root metrics and cross-checks everything against a brute-force
eigenvalue oracle.
"""

import argparse
import logging
import sys
from typing import List, Optional

from cli.formatting import render, write_csv
from cli.runner import CheckRunner, CommandResult
from config.metric_config import load_metric_config
from config.settings import load_settings, logging_level
from errors import SymFinslerError
from riemann.surface import EXACT, MODES

logger = logging.getLogger(__name__)

EXIT_USAGE = 2


def parse_values(text: str) -> List[float]:
    """
    Parse a value list such as "1,2,3,4", "0..11" or "0.5,1..3".

    Ranges are inclusive integer ranges.
    """
    values: List[float] = []
    for item in text.split(','):
        item = item.strip()
        if not item:
            continue
        try:
            if '..' in item:
                start, stop = item.split('..', 1)
                values.extend(range(int(start), int(stop) + 1))
            else:
                number = float(item)
                values.append(int(number) if number.is_integer() else number)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid value list entry {item!r}")
    if not values:
        raise argparse.ArgumentTypeError(f"empty value list {text!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--json', action='store_true', help='print the report as JSON')
    common.add_argument('--csv', metavar='PATH', help='write the command table as CSV')
    common.add_argument('--seed', type=int, help='random seed (default from settings)')
    common.add_argument('--samples', type=int, help='sample or direction count')
    common.add_argument('--tol', type=float, help='tolerance for residual checks')
    common.add_argument('--settings', metavar='YAML', help='settings file (default: search config.yaml)')
    common.add_argument('-v', '--verbose', action='store_true', help='debug logging')

    parser = argparse.ArgumentParser(prog='symfinsler', description=__doc__.strip().splitlines()[0])
    commands = parser.add_subparsers(dest='command', required=True)

    check2d = commands.add_parser('check2d', parents=[common], help='2D positive definiteness and classification')
    check2d.add_argument('config')

    check3d = commands.add_parser('check3d', parents=[common], help='3D necessary conditions and numeric evidence')
    check3d.add_argument('config')

    table = commands.add_parser('table', parents=[common], help='n-interval table')
    table.add_argument('--l', dest='l_values', type=parse_values, help='l values, e.g. 1,2,3,4')
    table.add_argument('--m', dest='m_values', type=parse_values, help='|m| values, e.g. 0..11')
    table.add_argument('--decimals', type=int, help='decimals in the displayed bounds')

    curvature = commands.add_parser('curvature', parents=[common], help='surface curvature of a p-field')
    curvature.add_argument('config')
    curvature.add_argument('--constant-k', type=float, help='verify K = k at every sample point')
    curvature.add_argument('--mode', choices=MODES, default=EXACT, help='how partials are computed')

    oracle = commands.add_parser('oracle-compare', parents=[common], help='criterion against eigenvalue oracle')
    oracle.add_argument('config', nargs='?')
    oracle.add_argument('--random', type=int, metavar='N', help='compare N random coefficient sets')
    oracle.add_argument('--margin', type=float, help='relative boundary margin')

    field = commands.add_parser('classify-field', parents=[common], help='grid classification of a 2D field')
    field.add_argument('config')

    energy = commands.add_parser('energy', parents=[common], help='energy-function relation for the Hessian')
    energy.add_argument('config')

    return parser


def run(args: argparse.Namespace, runner: CheckRunner) -> CommandResult:
    if args.command == 'table':
        return runner.table(args.l_values, args.m_values, args.decimals)
    if args.command == 'oracle-compare':
        if args.config is None and args.random is None:
            raise SymFinslerError("oracle-compare needs a config or --random N")
        config = load_metric_config(args.config) if args.config else None
        return runner.oracle_compare(config, args.random, args.seed, args.samples, args.margin)

    config = load_metric_config(args.config)
    if args.command == 'check2d':
        return runner.check2d(config)
    if args.command == 'check3d':
        return runner.check3d(config, args.samples)
    if args.command == 'curvature':
        return runner.curvature(config, args.constant_k, args.tol, args.mode, args.samples, args.seed)
    if args.command == 'classify-field':
        return runner.classify_field(config)
    if args.command == 'energy':
        return runner.energy(config, args.samples, args.seed, args.tol)
    raise SymFinslerError(f"Unknown command {args.command}")


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the exit status (0 pass, 1 definite failure, 2 usage or config error)."""
    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else 0

    try:
        settings = load_settings(args.settings)
        logging.getLogger().setLevel(logging.DEBUG if args.verbose else logging_level(settings))

        runner = CheckRunner(settings)
        result = run(args, runner)
        if args.csv:
            if result.table is None:
                logger.warning(f"{args.command} produces no table; --csv ignored")
            else:
                write_csv(result.table, args.csv)
        print(render(result.report, args.json, result.text))
        return result.exit_code
    except (SymFinslerError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
