"""The cli module.

Batch front-end: loads JSON inputs, dispatches one operation and writes a
JSON report (and CSV plot data where applicable).

Exit status is ``0`` when the run completed (diverging verdicts included),
``1`` for invalid input and ``2`` for a numerical failure.
"""

import argparse
import logging
import sys

import numpy as np

from .__version__ import __version__
from .base import ConfigError, FockError, InputError
from . import battery, conditions, kernel, loaders, ode, reports
from .quadrature import QuadratureConfig
from .weights import classify_weight, lemma28_admissible


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2

#: Arguments naming input or artifact files, recorded as manifest inputs.
INPUT_ARGUMENTS = frozenset([
    'candidate', 'coefficient', 'config', 'constants', 'csv', 'function',
    'grid', 'problem', 'space', 'weight'])

#: Arguments that do not affect the report.
MANIFEST_EXCLUDED = frozenset(['action', 'command', 'name', 'out', 'seed',
                               'verbose'])


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-v', '--verbose', action='count', default=0,
                        help='Log progress to stderr (repeat for debug).')
    common.add_argument('--seed', type=int, default=0,
                        help='Seed of randomized inputs (default: 0).')
    common.add_argument('--out', help='Report path (default: stdout).')
    common.add_argument('--config', help='Quadrature config JSON file.')
    common.add_argument('--grid-scale', type=float, default=1.0,
                        dest='grid_scale',
                        help='Multiply the radial and angular grid sizes.')
    common.add_argument('--workers', type=int, default=None,
                        help='Threads for independent sub-tasks.')

    parser = argparse.ArgumentParser(
        prog='fockcheck',
        description='Numerical checks for weighted Fock spaces and linear '
                    'differential equations.')
    parser.add_argument('--version', action='version', version=__version__)
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True

    weights = commands.add_parser('weights', help='Weight diagnostics.')
    weights_commands = weights.add_subparsers(dest='action', metavar='action')
    weights_commands.required = True
    check = weights_commands.add_parser('check', parents=[common],
                                        help='Classify a weight profile.')
    check.add_argument('weight')
    check.add_argument('--r-max', type=float, default=100.0, dest='r_max')
    check.add_argument('--p', type=float, default=None)
    check.set_defaults(name='weights check')

    norm = commands.add_parser('norm', parents=[common],
                               help='Weighted norm and membership verdict.')
    norm.add_argument('function')
    norm.add_argument('space')
    norm.set_defaults(name='norm')

    kernels = commands.add_parser('kernel', help='Reproducing kernel tools.')
    kernel_commands = kernels.add_subparsers(dest='action', metavar='action')
    kernel_commands.required = True
    table = kernel_commands.add_parser('table', parents=[common],
                                       help='Tabulate δ_n².')
    table.add_argument('weight')
    table.add_argument('--N', type=int, default=30)
    table.add_argument('--csv', help='CSV path of the table.')
    table.set_defaults(name='kernel table')

    reproduce = kernel_commands.add_parser(
        'reproduce', parents=[common], help='Check the reproducing property.')
    reproduce.add_argument('weight')
    reproduce.add_argument('function')
    reproduce.add_argument('--N', type=int, default=40)
    reproduce.add_argument('--points', type=int, default=24)
    reproduce.add_argument('--radius', type=float, default=2.0)
    reproduce.set_defaults(name='kernel reproduce')

    solve = commands.add_parser('solve', parents=[common],
                                help='Solve along rays.')
    solve.add_argument('problem')
    _add_ray_arguments(solve)
    solve.add_argument('--order', type=int, default=conditions.SOLVE_ORDER,
                       help='Taylor series degree.')
    solve.add_argument('--weight', help='Weight JSON for |f|e^(-φ) samples.')
    solve.set_defaults(name='solve')

    envelope = commands.add_parser('envelope', parents=[common],
                                   help='Growth envelope along rays.')
    envelope.add_argument('problem')
    _add_ray_arguments(envelope)
    envelope.add_argument('--R0', type=float, default=1.0, dest='R_0')
    envelope.set_defaults(name='envelope')

    theorem = commands.add_parser('check', parents=[common],
                                  help='Check a theorem on an input.')
    theorem.add_argument('--theorem', required=True,
                         type=_theorem_name,
                         help='One of T1.1 .. T1.8.')
    theorem.add_argument('--problem')
    theorem.add_argument('--weight')
    theorem.add_argument('--coefficient',
                         help='Function JSON of A in f″ + A f = 0.')
    theorem.add_argument('--candidate', help='Candidate solution JSON.')
    theorem.add_argument('--constants', help='Constants JSON.')
    theorem.add_argument('--grid', help='Probe grid JSON.')
    theorem.add_argument('--p', type=float, default=2.0)
    theorem.add_argument('--q', type=float, default=0.0)
    theorem.add_argument('--N', type=int, default=24,
                         help='Kernel truncation degree.')
    theorem.add_argument('--derive-a0', action='store_true',
                         dest='derive_a0')
    theorem.set_defaults(name='check')

    suite = commands.add_parser('battery', parents=[common],
                                help='Run the invariant battery.')
    suite.add_argument('--only', nargs='+', default=None,
                       choices=[name for name, _ in battery.CASES])
    suite.set_defaults(name='battery')

    return parser


def _add_ray_arguments(parser):
    parser.add_argument('--theta', type=float, action='append',
                        help='Ray angle; repeat for several rays '
                             '(default: 0).')
    parser.add_argument('--r-max', type=float, required=True, dest='r_max')
    parser.add_argument('--samples', type=int, default=201)
    parser.add_argument('--tol', type=float, default=1e-10)
    parser.add_argument('--csv', help='CSV path of the ray samples.')


def _theorem_name(text):
    name = text.upper().replace('.', '_')
    if name not in conditions.THEOREMS:
        raise argparse.ArgumentTypeError(
            'expected one of T1.1 .. T1.8 but found {!r}'.format(text))
    return name


def main(argv=None):
    """Run the command line and return the exit status."""
    args = build_parser().parse_args(argv)

    logging.basicConfig(
        level=max(logging.DEBUG, logging.WARNING - 10 * args.verbose),
        format='%(levelname)s %(name)s: %(message)s', stream=sys.stderr)

    try:
        manifest = build_manifest(args)
    except ConfigError as exc:
        print('config {}: {}'.format(exc.field, exc.message), file=sys.stderr)
        return EXIT_INPUT

    return run(manifest)


def build_manifest(args):
    """Return the :class:`.RunManifest` describing parsed arguments.

    File arguments go to ``inputs`` and every other option to
    ``overrides``, so the manifest alone determines the report.
    """
    inputs, overrides = {}, {}
    for key, value in sorted(vars(args).items()):
        if key in INPUT_ARGUMENTS:
            inputs[key] = value
        elif key not in MANIFEST_EXCLUDED:
            overrides[key] = value
    return reports.RunManifest(args.name, inputs, overrides, args.seed,
                               args.out)


def run(manifest):
    """Execute a manifest, write its report and return the exit status.

    Exit status is ``0`` for a completed run, ``1`` for invalid input and
    ``2`` for a numerical failure. Diverging verdicts are part of a completed
    run.
    """
    args = argparse.Namespace(seed=manifest.seed, out=manifest.out,
                              **manifest.inputs, **manifest.overrides)
    handler = COMMANDS[manifest.command]

    try:
        cfg = _quadrature(args)
        result, grids = handler(args, cfg)
        text = reports.write_json(
            reports.build_report(manifest, result, quadrature=cfg, **grids),
            manifest.out)
    except InputError as exc:
        for path, message in exc.paths:
            print('{}: {}'.format(path, message), file=sys.stderr)
        return EXIT_INPUT
    except ConfigError as exc:
        print('config {}: {}'.format(exc.field, exc.message), file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT
    except FockError as exc:
        print('{}: {}'.format(exc.__class__.__name__, exc), file=sys.stderr)
        return EXIT_NUMERICAL

    if manifest.out is None:
        sys.stdout.write(text)

    return EXIT_OK


def _quadrature(args):
    cfg = QuadratureConfig()
    if args.config:
        cfg = loaders.load_quadrature(loaders.read_json(args.config))
    if args.grid_scale != 1.0:
        cfg = cfg.scaled(args.grid_scale)
    return cfg


def _load(path, loader):
    return loader(loaders.read_json(path))


def run_weights_check(args, cfg):
    profile = _load(args.weight, loaders.load_weight)
    result = {'weight': profile.to_dict(),
              'diagnostics': classify_weight(profile, r_max=args.r_max,
                                             p=args.p).to_dict()}
    if args.p is not None:
        flags = lemma28_admissible(profile, args.p)
        result['lemma28'] = dict(flags._asdict(), admissible=flags.admissible)
    return result, {}


def run_norm(args, cfg):
    f = _load(args.function, loaders.load_function)
    space = _load(args.space, loaders.load_space)
    verdict = ode.membership_probe(f, space, cfg)
    return {'space': space.to_dict(), 'verdict': verdict.to_dict()}, {}


def run_kernel_table(args, cfg):
    profile = _load(args.weight, loaders.load_weight)
    basis = kernel.compute_deltas(profile, args.N, cfg, args.workers)
    if args.csv:
        reports.write_csv(reports.KERNEL_COLUMNS, reports.kernel_rows(basis),
                          args.csv)
    return {'basis': basis.to_dict()}, {}


def run_kernel_reproduce(args, cfg):
    profile = _load(args.weight, loaders.load_weight)
    f = _load(args.function, loaders.load_function)
    basis = kernel.compute_deltas(profile, args.N, cfg, args.workers)

    rng = np.random.default_rng(args.seed)
    points = args.radius * np.sqrt(rng.uniform(0, 1, args.points)) * np.exp(
        1j * rng.uniform(0, 2 * np.pi, args.points))
    checks = [kernel.reproduce_check(basis, f, zeta, cfg) for zeta in points]

    result = {'points': points,
              'checks': [dict(check._asdict()) for check in checks],
              'max_rel_err': max(check.rel_err for check in checks)}
    return result, {'points': points}


def run_solve(args, cfg):
    problem = _load(args.problem, loaders.load_problem)
    profile = None
    if args.weight:
        profile = _load(args.weight, loaders.load_weight)

    thetas = args.theta or [0.0]
    radii = np.linspace(0.0, args.r_max, args.samples)
    traces = ode.ray_fan(problem, thetas, args.r_max, args.tol, radii,
                         args.workers)
    if profile is not None:
        traces = [trace._replace(weighted=np.abs(trace.f) * np.exp(
            -profile.phi(trace.radii))) for trace in traces]

    series = ode.taylor_solve(problem, args.order)
    _write_rays(args, traces)

    result = {'problem': problem.to_dict(),
              'series': series.to_dict(),
              'rays': [_ray_summary(trace) for trace in traces]}
    return result, {'radii': radii, 'thetas': np.asarray(thetas)}


def run_envelope(args, cfg):
    problem = _load(args.problem, loaders.load_problem)
    thetas = args.theta or [0.0]
    radii = np.linspace(0.0, args.r_max, args.samples)

    traces, envelopes, rays = [], [], []
    for theta in thetas:
        trace = ode.ray_integrate(problem, theta, args.r_max, args.tol, radii)
        envelope = ode.growth_envelope(problem, theta, trace.radii, args.R_0)
        beyond = trace.radii > envelope.R_0
        violations = int(np.sum(np.abs(trace.f[beyond]) >
                                envelope.values[beyond]))
        traces.append(trace)
        envelopes.append(envelope)
        rays.append(dict(_ray_summary(trace), C=envelope.C,
                         C_value=envelope.C_value,
                         R_0=envelope.R_0, shifted=envelope.shifted,
                         violations=violations))

    _write_rays(args, traces, envelopes)
    return {'problem': problem.to_dict(), 'rays': rays}, {'radii': radii}


def run_check(args, cfg):
    theorem = args.theorem
    grid = conditions.ProbeGrid()
    if args.grid:
        grid = _load(args.grid, loaders.load_probe_grid)

    profile = None
    if args.weight:
        profile = _load(args.weight, loaders.load_weight)

    if theorem in conditions.KERNEL_THEOREMS:
        A = _load(_required(args, 'coefficient'), loaders.load_function)
        profile = profile or _missing('weight')
        basis = kernel.compute_deltas(profile, args.N, cfg, args.workers)
        report = conditions.check_kernel_theorem(theorem, profile, A, basis,
                                                 cfg, grid)
        return report.to_dict(), {'probe_grid': grid.points()}

    problem = _load(_required(args, 'problem'), loaders.load_problem)

    if theorem in ('T1_1', 'T1_2'):
        constants = conditions.ConstantsConfig()
        if args.constants:
            constants = _load(args.constants, loaders.load_constants)
        check = (conditions.check_thm11 if theorem == 'T1_1'
                 else conditions.check_thm12)
        report = check(problem, args.p, constants, cfg)
    elif theorem == 'T1_3':
        report = conditions.check_thm13(problem, profile or _missing('weight'),
                                        args.p, args.q, cfg)
    elif theorem == 'T1_4':
        candidate = None
        if args.candidate:
            candidate = _load(args.candidate, loaders.load_function)
        report = conditions.check_thm14(problem, args.p, cfg, candidate)
    else:
        candidate = _load(_required(args, 'candidate'),
                          loaders.load_function)
        report = conditions.check_thm15(problem, args.p, args.q, candidate,
                                        cfg, derive_a0=args.derive_a0)

    return report.to_dict(), {}


def run_battery(args, cfg):
    results = battery.run_battery(args.seed, cfg, args.only, args.workers)
    return {'cases': results,
            'passed': all(case.passed for case in results)}, {}


def _write_rays(args, traces, envelopes=None):
    if args.csv:
        reports.write_csv(reports.RAY_COLUMNS,
                          reports.ray_rows(traces, envelopes), args.csv)


def _ray_summary(trace):
    return {'theta': trace.theta,
            'r_end': float(trace.radii[-1]) if len(trace.radii) else 0.0,
            'f_end': trace.last() if len(trace.radii) else None,
            'blowup': trace.blowup,
            'message': trace.message}


def _required(args, name):
    value = getattr(args, name)
    if value is None:
        _missing(name)
    return value


def _missing(name):
    raise InputError('Input validation failed',
                     errors={name: 'missing required input'},
                     data=None, original_data=None)


#: Command name to handler.
COMMANDS = {
    'weights check': run_weights_check,
    'norm': run_norm,
    'kernel table': run_kernel_table,
    'kernel reproduce': run_kernel_reproduce,
    'solve': run_solve,
    'envelope': run_envelope,
    'check': run_check,
    'battery': run_battery,
}
