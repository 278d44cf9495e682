import sys
import math

from ..spaces import (parse_map, cesaro_run, sqrt_envelope, residual_envelope_check,
                      write_trace_csv, PREFIX_WINDOW)
from ..rng import DEFAULT_SEED
from .utils import (base_parser, run, open_output, parse_space, parse_point, positive, UsageError,
                    EXIT_OK, EXIT_VIOLATION)


def build_parser():
    parser = base_parser('cesaro simulate', 'Cesaro means of a nonexpansive map, residual trace as CSV')
    parser.add_argument('--map', required=True)
    parser.add_argument('--space', default='l2:2')
    parser.add_argument('--x', help='starting point, comma separated')
    parser.add_argument('--nmax', type=int, default=1000)
    parser.add_argument('--alpha', type=float, default=0.0, help='orbit perturbation bound')
    parser.add_argument('--b', type=float, help='norm bound, the domain is the ball of radius b/2')
    parser.add_argument('--envelope', action='store_true', help='add diam/sqrt(n) and check against it')
    parser.add_argument('--diam', type=float, help='envelope diameter, defaults to b')
    parser.add_argument('--every', type=int, default=1, help='record every k-th step past the first %d' % PREFIX_WINDOW)
    parser.add_argument('--seed', type=int, default=DEFAULT_SEED)
    return parser


def cmd_simulate(parser, args):
    if not args.x:
        raise UsageError("--x is required")
    if args.nmax is None or args.nmax < 1:
        raise UsageError("--nmax must be a positive integer")
    space = parse_space(args.space)
    radius = math.inf if args.b is None else 0.5 * positive('b', args.b)
    T = parse_map(args.map, space, radius)
    x = parse_point(args.x)

    envelope = None
    if args.envelope:
        diam = args.diam if args.diam is not None else args.b
        envelope = sqrt_envelope(positive('diam', diam))

    trace = cesaro_run(space, T, x, args.nmax, alpha_noise=args.alpha, seed=args.seed, radius=radius,
                       every=args.every)
    with open_output(args.output) as handle:
        write_trace_csv(trace, handle, envelope)
    if envelope is not None:
        report = residual_envelope_check(trace, envelope)
        if not report.passed:
            for n, residual, bound in report.violations[:10]:
                sys.stderr.write('envelope violated at n=%d: %r > %r\n' % (n, residual, bound))
            return EXIT_VIOLATION
    return EXIT_OK


def main(*argv):
    """Writes the n,residual[,envelope] trace of a Cesaro run"""
    return run(build_parser(), cmd_simulate, argv)


if __name__ == "__main__":
    sys.exit(main(*sys.argv[1:]))
