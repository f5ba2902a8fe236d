"""
qnr: command-line front end

Every command prints one JSON document (sorted keys) on stdout, except
`range` and `radius` with --format csv. Logs go to stderr.
Exit codes: 0 success, 1 invalid input or violated precondition,
2 an optimizer did not converge (results are still printed).
"""

import argparse
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, TextIO

import numpy as np
import pandas as pd

from qnumrange import config as defaults
from qnumrange.config import default_seed, load_config, optimizer_config_from
from qnumrange.cli.selftest import SelfTestSuite
from qnumrange.cradius import CRadiusCalculator
from qnumrange.dual import DualNormEstimator
from qnumrange.isometry import (
    IsometryRecovery, IsometryVerifier, apply, descriptor_from_dict, descriptor_to_dict, random_descriptor,
)
from qnumrange.linalg import (
    DaggerMode, QParameter, hs_norm, matrix_to_json, numerical_rank, scalar_to_json, vector_from_json,
)
from qnumrange.orbit import (
    build_cq, canonicalize, decompose_rank_one, is_in_orbit, make_orbit_element, orbit_element_to_dict,
    random_orbit_element, rank_one_decomposition_span, rank_two_decomposition_span,
)
from qnumrange.radius import EquivalenceChecker, RadiusCalculator
from qnumrange.storage import FileStorage
from qnumrange.utils import DomainError, NotTheoremFormError, ValidationError, setup_logger

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NOT_CONVERGED = 2


@dataclass
class CommandResult:
    command: str
    inputs: Dict[str, Any]
    output: Any
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    converged: bool = True

    @property
    def status(self) -> str:
        return "ok" if self.converged else "not_converged"

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.converged else EXIT_NOT_CONVERGED

    def to_dict(self) -> Dict[str, Any]:
        return {'command': self.command, 'inputs': self.inputs, 'output': self.output,
                'diagnostics': self.diagnostics, 'status': self.status}


class _Parser(argparse.ArgumentParser):
    """Parse errors are input errors (exit 1), not argparse's exit 2"""

    def error(self, message):
        raise ValidationError(f"{self.prog}: {message}")


def _q_value(text: str) -> float:
    try:
        return QParameter(float(text)).q
    except (ValueError, ValidationError):
        raise argparse.ArgumentTypeError(f"q must be a decimal in (0, 1], got {text!r}")


def _complex_value(text: str) -> complex:
    try:
        parts = [float(p) for p in text.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 're,im', got {text!r}")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 're,im', got {text!r}")
    return complex(parts[0], parts[1])


class Context:
    """Parsed arguments plus the loaded configuration and file storage"""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.settings = load_config(args.config)
        self.seed = default_seed() if args.seed is None else args.seed
        self.storage = FileStorage()

    def optimizer(self, section: str = "optimizer"):
        return optimizer_config_from(self.settings, section, seed=self.seed,
                                     restarts=self.args.restarts, threads=self.args.threads)

    def dual_estimator(self) -> DualNormEstimator:
        settings = self.settings['dual']
        return DualNormEstimator(self.optimizer(), gap_tol=settings['gap_tol'], feas_tol=settings['feas_tol'],
                                 max_rounds=settings['max_rounds'], phase_count=settings['phase_grid'],
                                 max_dimension=settings['max_dimension'], ascent_iters=settings['ascent_iters'],
                                 ascent_starts=settings['ascent_starts'])

    def matrix(self, path: str):
        return self.storage.load_matrix(path)


# ---------------------------------------------------------------- commands

def cmd_radius(ctx: Context) -> CommandResult:
    args = ctx.args
    A = ctx.matrix(args.input)
    if args.c is not None:
        C = ctx.matrix(args.c)
        calculator = CRadiusCalculator(ctx.optimizer("c_radius"))
        estimate = calculator.c_radius(A, C)
        output = {'kind': 'c_radius', 'estimate': estimate.to_dict(),
                  'norm_certificate': calculator.norm_certificate(C).to_dict()}
    else:
        calculator = RadiusCalculator(ctx.optimizer())
        if args.q is None:
            estimate = calculator.numerical_radius(A)
            kind = 'numerical_radius'
        elif args.method == 'direct':
            estimate = calculator.q_radius_direct(A, args.q)
            kind = 'q_radius_direct'
        else:
            estimate = calculator.q_radius_reduced(A, args.q)
            kind = 'q_radius_reduced'
        output = {'kind': kind, 'estimate': estimate.to_dict()}
    return CommandResult('radius', {}, output, {'converged': estimate.converged}, estimate.converged)


def cmd_range(ctx: Context) -> CommandResult:
    args = ctx.args
    A = ctx.matrix(args.input)
    if args.c is not None:
        points = CRadiusCalculator().c_range_sample(A, ctx.matrix(args.c), args.count, ctx.seed)
    else:
        points = RadiusCalculator().q_range_sample(A, 1.0 if args.q is None else args.q, args.count, ctx.seed)
    return CommandResult('range', {}, {'points': [scalar_to_json(z) for z in points]})


def cmd_orbit(ctx: Context) -> CommandResult:
    args = ctx.args
    q = QParameter(args.q)
    action = args.orbit_command

    if action == 'check':
        A = ctx.matrix(args.input)
        return CommandResult('orbit check', {}, is_in_orbit(A, q, args.tol).to_dict())

    if action == 'make':
        rng = np.random.default_rng(ctx.seed)
        if args.x is not None:
            x = vector_from_json(ctx.storage.load_json(args.x))
            w = vector_from_json(ctx.storage.load_json(args.w)) if args.w is not None else None
            element = make_orbit_element(q, x, w, args.theta)
        else:
            element = random_orbit_element(q, args.n, rng)
        membership = is_in_orbit(element.matrix, q)
        return CommandResult('orbit make', {}, {'element': orbit_element_to_dict(element),
                                                'membership': membership.to_dict()})

    if action == 'canon':
        A = ctx.matrix(args.input)
        theta, U = canonicalize(A, q)
        residual = hs_norm(A - theta * (U.conj().T @ build_cq(q, A.shape[0]) @ U))
        return CommandResult('orbit canon', {}, {'theta': scalar_to_json(theta), 'U': matrix_to_json(U),
                                                 'residual': residual})

    if action == 'decompose':
        R = ctx.matrix(args.input)
        a, b = decompose_rank_one(R, q, t=args.t, k=args.k, p_prime=args.p_prime)
        return CommandResult('orbit decompose', {}, {
            'A': orbit_element_to_dict(a), 'B': orbit_element_to_dict(b),
            'sum_residual': hs_norm(a.matrix + b.matrix - R),
            'A_in_orbit': bool(is_in_orbit(a.matrix, q)), 'B_in_orbit': bool(is_in_orbit(b.matrix, q)),
        })

    # span
    R = ctx.matrix(args.input)
    rank = numerical_rank(R, defaults.RANK_TOL)
    if rank == 1:
        report = rank_one_decomposition_span(R, q, args.samples, ctx.seed)
    elif rank == 2:
        report = rank_two_decomposition_span(R, args.samples, ctx.seed)
    else:
        raise DomainError(f"span analysis needs rank one or two, got rank {rank}")
    return CommandResult('orbit span', {}, report.to_dict())


def cmd_dual(ctx: Context) -> CommandResult:
    args = ctx.args
    T = ctx.matrix(args.input)
    estimate = ctx.dual_estimator().dual_radius(T, args.q, gap_tol=args.gap_tol, allow_large=args.allow_large)
    return CommandResult('dual', {}, estimate.to_dict(),
                         {'converged': estimate.converged, 'gap': estimate.gap}, estimate.converged)


def _load_descriptor(ctx: Context, path: str):
    payload = ctx.storage.load_json(path)
    if isinstance(payload, dict) and 'descriptor' in payload:
        payload = payload['descriptor']
    return descriptor_from_dict(payload)


def cmd_isometry(ctx: Context) -> CommandResult:
    args = ctx.args
    action = args.isometry_command

    if action == 'make':
        d = random_descriptor(args.n, ctx.seed, args.mode)
        if args.output:
            ctx.storage.write_json(args.output, descriptor_to_dict(d))
        return CommandResult('isometry make', {}, {'descriptor': descriptor_to_dict(d)})

    d = _load_descriptor(ctx, args.map_spec)
    if action == 'verify':
        scale = args.scale

        def f(A):
            return scale * apply(d, A)

        report = IsometryVerifier(ctx.optimizer()).verify_isometry(f, args.q, args.trials, ctx.seed, d.n)
        return CommandResult('isometry verify', {}, report.to_dict())

    report = IsometryRecovery(ctx.seed).recover(lambda A: apply(d, A), args.q, d.n)
    return CommandResult('isometry recover', {}, report.to_dict())


def cmd_bounds(ctx: Context) -> CommandResult:
    args = ctx.args
    A = ctx.matrix(args.input)
    cfg = ctx.optimizer()
    report = EquivalenceChecker(cfg).check_equivalence(A, args.q)
    output = {'equivalence': report.to_dict(), 'dual_trace_sandwich': None}
    estimator = ctx.dual_estimator()
    if A.shape[0] <= estimator.max_dimension:
        output['dual_trace_sandwich'] = estimator.dual_trace_sandwich(A, args.q).to_dict()
    return CommandResult('bounds', {}, output)


def cmd_selftest(ctx: Context) -> CommandResult:
    suite = SelfTestSuite(seed=ctx.seed, full=ctx.args.full, threads=ctx.args.threads or 1)
    report = suite.run()
    return CommandResult('selftest', {}, report, {'passed': report['passed']})


# ----------------------------------------------------------------- parsing

def _common_options() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument('--seed', type=int, default=None, help=f"Seed (default ${defaults.SEED_ENV_VAR} or 0)")
    common.add_argument('--restarts', type=int, default=None, help="Optimizer restarts")
    common.add_argument('--threads', type=int, default=None, help="Worker threads for restarts and trials")
    common.add_argument('--config', default=None, help="JSON config laid out like config.example.json")
    common.add_argument('--log-level', default=None, help="Console log level (default from config)")
    common.add_argument('--log-file', default=None, help="Also log to this rotating file")
    common.add_argument('--timing', action='store_true', help="Add wall-clock timing to diagnostics")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _Parser(prog='qnr', description="q-numerical radius and C-numerical range toolkit")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('radius', parents=[common], help="classical, q- or C-numerical radius")
    p.add_argument('--input', required=True)
    p.add_argument('--q', type=_q_value, default=None)
    p.add_argument('--c', default=None, help="matrix file for C (C-numerical radius)")
    p.add_argument('--method', choices=['reduced', 'direct'], default='reduced')
    p.add_argument('--format', choices=['json', 'csv'], default='json')
    p.set_defaults(handler=cmd_radius)

    p = sub.add_parser('range', parents=[common], help="sampled q- or C-numerical range")
    p.add_argument('--input', required=True)
    p.add_argument('--q', type=_q_value, default=None)
    p.add_argument('--c', default=None)
    p.add_argument('--count', type=int, default=1000)
    p.add_argument('--format', choices=['json', 'csv'], default='csv')
    p.set_defaults(handler=cmd_range)

    p = sub.add_parser('orbit', help="saturated unitary orbit of C_q")
    orbit = p.add_subparsers(dest='orbit_command', required=True)
    o = orbit.add_parser('check', parents=[common])
    o.add_argument('--input', required=True)
    o.add_argument('--q', type=_q_value, required=True)
    o.add_argument('--tol', type=float, default=defaults.ORBIT_TOL)
    o = orbit.add_parser('make', parents=[common])
    o.add_argument('--q', type=_q_value, required=True)
    o.add_argument('--n', type=int, default=2)
    o.add_argument('--x', default=None, help="vector JSON file for x (random when absent)")
    o.add_argument('--w', default=None, help="vector JSON file for w, orthogonal to x")
    o.add_argument('--theta', type=_complex_value, default=complex(1.0, 0.0), help="'re,im'")
    o = orbit.add_parser('canon', parents=[common])
    o.add_argument('--input', required=True)
    o.add_argument('--q', type=_q_value, required=True)
    o = orbit.add_parser('decompose', parents=[common])
    o.add_argument('--input', required=True)
    o.add_argument('--q', type=_q_value, required=True)
    o.add_argument('--t', type=float, default=0.0)
    o.add_argument('--k', type=int, default=3, help="1-based column index >= 3")
    o.add_argument('--p-prime', dest='p_prime', type=float, default=None)
    o = orbit.add_parser('span', parents=[common])
    o.add_argument('--input', required=True)
    o.add_argument('--q', type=_q_value, required=True)
    o.add_argument('--samples', type=int, default=200)
    p.set_defaults(handler=cmd_orbit)

    p = sub.add_parser('dual', parents=[common], help="two-sided estimate of r_q*")
    p.add_argument('--input', required=True)
    p.add_argument('--q', type=_q_value, required=True)
    p.add_argument('--gap-tol', dest='gap_tol', type=float, default=None)
    p.add_argument('--allow-large', dest='allow_large', action='store_true')
    p.set_defaults(handler=cmd_dual)

    p = sub.add_parser('isometry', help="isometries S0 + mu U* A^dag U")
    iso = p.add_subparsers(dest='isometry_command', required=True)
    i = iso.add_parser('verify', parents=[common])
    i.add_argument('--map-spec', dest='map_spec', required=True)
    i.add_argument('--q', type=_q_value, required=True)
    i.add_argument('--trials', type=int, default=10)
    i.add_argument('--scale', type=float, default=1.0, help="test the map A -> S phi(A) instead")
    i = iso.add_parser('recover', parents=[common])
    i.add_argument('--map-spec', dest='map_spec', required=True)
    i.add_argument('--q', type=_q_value, required=True)
    i = iso.add_parser('make', parents=[common])
    i.add_argument('--n', type=int, required=True)
    i.add_argument('--mode', choices=[m.value for m in DaggerMode], default=None)
    i.add_argument('--output', default=None, help="also write the descriptor JSON here")
    p.set_defaults(handler=cmd_isometry)

    p = sub.add_parser('bounds', parents=[common], help="equivalence constants and trace-norm sandwich")
    p.add_argument('--input', required=True)
    p.add_argument('--q', type=_q_value, required=True)
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser('selftest', parents=[common], help="oracle cross-checks and acceptance suite")
    p.add_argument('--full', action='store_true', help="run every check at its full trial count")
    p.add_argument('--format', choices=['json', 'table'], default='json')
    p.set_defaults(handler=cmd_selftest)
    return parser


def _echo(args: argparse.Namespace) -> Dict[str, Any]:
    skip = {'handler', 'timing', 'log_level', 'log_file'}
    echo = {}
    for key, value in sorted(vars(args).items()):
        if key in skip:
            continue
        if isinstance(value, complex):
            value = scalar_to_json(value)
        echo[key] = value
    return echo


def _emit(result: CommandResult, args: argparse.Namespace, storage: FileStorage, out: TextIO) -> None:
    fmt = getattr(args, 'format', 'json')
    if args.command == 'range' and fmt == 'csv':
        points = [complex(re, im) for re, im in result.output['points']]
        storage.write_points_csv(out, points)
    elif args.command == 'radius' and fmt == 'csv':
        row = {k: v for k, v in result.output['estimate'].items() if not isinstance(v, (dict, list, type(None)))}
        row['kind'] = result.output['kind']
        pd.DataFrame([row]).to_csv(out, index=False, float_format='%.17g', lineterminator='\n')
    elif args.command == 'selftest' and fmt == 'table':
        table = storage.table(result.output['checks'])
        out.write(table.to_string(index=False) + "\n")
        out.write(f"passed: {result.output['passed']}\n")
    else:
        storage.write_json(out, result.to_dict())


def run(argv: Sequence[str], stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(list(argv))
        ctx = Context(args)
        log_settings = ctx.settings.get('logging', {})
        logger = setup_logger('qnumrange', args.log_file or log_settings.get('file'),
                              args.log_level or log_settings.get('level', 'INFO'))
        started = time.perf_counter()
        result = args.handler(ctx)
        result.inputs = _echo(args)
        result.inputs['seed'] = ctx.seed
        if args.timing:
            result.diagnostics['elapsed_seconds'] = time.perf_counter() - started
        _emit(result, args, ctx.storage, stdout)
        if not result.converged:
            logger.warning(f"{result.command}: optimizer did not converge; values are lower bounds")
        return result.exit_code
    except NotTheoremFormError as e:
        stderr.write(f"error: {e}\n")
        stderr.write(f"diagnostics: {sorted(e.diagnostics.items())}\n")
        return EXIT_INVALID
    except (ValidationError, DomainError) as e:
        stderr.write(f"error: {e}\n")
        return EXIT_INVALID


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
