"""Command line entry point: ``nlpf run|converge|check <config>``.

Exit codes: 0 ok, 1 usage or config error, 2 numerical failure, 3 invariant
failure.
"""
import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .analysis import IncompatibleTrajectoriesError, convergence_study
from .checks import run_checks
from .config import ConfigError, load_config, scenario_to_config
from .io import timeseries_csv, write_snapshot
from .scheme import StepError, solve_trajectory

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_INVARIANT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, '{}: error: {}\n'.format(self.prog, message))


def _version():
    try:
        rev = subprocess.run(['git', 'describe', '--always', '--dirty'],
                             capture_output=True, text=True, timeout=5,
                             cwd=os.path.dirname(__file__))
        if rev.returncode == 0 and rev.stdout.strip():
            return '{}+g{}'.format(__version__, rev.stdout.strip())
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def _write_metadata(out, args, scenario, study, wall):
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, 'config.ini'), 'w') as fh:
        fh.write(scenario_to_config(scenario, study))
    meta = {'command': args.command, 'config': os.path.abspath(args.config),
            'version': _version(), 'wall_time_s': wall,
            'threads': args.threads}
    with open(os.path.join(out, 'metadata.json'), 'w') as fh:
        json.dump(meta, fh, indent=2)


def cmd_run(args, scenario, study):
    t0 = time.perf_counter()
    traj = solve_trajectory(scenario)
    wall = time.perf_counter() - t0
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, 'timeseries.csv'), 'w') as fh:
        fh.write(timeseries_csv(traj))
    if args.snapshots:
        snapdir = os.path.join(args.out, 'snapshots')
        os.makedirs(snapdir, exist_ok=True)
        for n in range(0, traj.N + 1, args.snapshots):
            stack = np.stack([traj.theta[n], traj.phi[n], traj.v[n],
                              traj.z[n]])
            write_snapshot(os.path.join(snapdir,
                                        'step_{:06d}.npfs'.format(n)), stack)
    _write_metadata(args.out, args, scenario, study, wall)
    print('wrote {} steps to {}'.format(traj.N, args.out))
    return EXIT_OK


def cmd_converge(args, scenario, study):
    if study is None:
        raise ConfigError('converge needs a [study] section')
    t0 = time.perf_counter()
    table = convergence_study(scenario, study.N_list, study.N_ref)
    wall = time.perf_counter() - t0
    os.makedirs(args.out, exist_ok=True)
    text = table.to_csv()
    with open(os.path.join(args.out, 'rates.csv'), 'w') as fh:
        fh.write(text)
    _write_metadata(args.out, args, scenario, study, wall)
    sys.stdout.write(text)
    if table.degenerate:
        print('# no rate fitted (single step size or zero error)')
    return EXIT_OK


def cmd_check(args, scenario, study):
    traj = solve_trajectory(scenario)
    results = run_checks(traj, scenario)
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    if failed:
        print('FAILED: ' + ', '.join(failed))
        return EXIT_INVARIANT
    print('all {} checks passed'.format(len(results)))
    return EXIT_OK


COMMANDS = {'run': cmd_run, 'converge': cmd_converge, 'check': cmd_check}


def build_parser():
    p = _Parser(prog='nlpf', description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest='command', required=True,
                           parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument('config')
        sp.add_argument('--out', default='out')
        sp.add_argument('--threads', type=int, default=1)
        sp.add_argument('--snapshots', type=int, default=0, metavar='K',
                        help='write field snapshots every K steps')
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.threads < 1 or args.snapshots < 0:
        print('nlpf: --threads must be >= 1 and --snapshots >= 0',
              file=sys.stderr)
        return EXIT_USAGE
    try:
        scenario, study = load_config(args.config)
        with threadpool_limits(limits=args.threads):
            return COMMANDS[args.command](args, scenario, study)
    except (ConfigError, IncompatibleTrajectoriesError) as exc:
        print('nlpf: {}'.format(exc), file=sys.stderr)
        return EXIT_USAGE
    except (StepError, ArithmeticError) as exc:
        print('nlpf: numerical failure: {}'.format(exc), file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == '__main__':
    sys.exit(main())
