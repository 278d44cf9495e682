import sys

from ..moduli import parse_modulus
from ..pisier import rademacher_profile, delta_from_modulus, DEFAULT_THETA
from ..rates import rate_plan, hilbert_rate, RatePlan, AUTO, CLOSED, EXPLICIT
from .utils import base_parser, run, open_output, positive, UsageError, EXIT_OK


def build_parser():
    parser = base_parser('cesaro rate', 'Rate of asymptotic regularity for Cesaro means')
    parser.add_argument('--modulus', default='hilbert')
    parser.add_argument('--eps', type=float)
    parser.add_argument('--b', type=float, help='norm bound, the domain lies in the ball of radius b/2')
    parser.add_argument('--theta', type=float, default=DEFAULT_THETA)
    parser.add_argument('--q', type=float, help='type exponent, skips the Rademacher pipeline (with --Cq)')
    parser.add_argument('--Cq', dest='C_q', type=float)
    parser.add_argument('--method', choices=(AUTO, CLOSED, EXPLICIT), default=AUTO)
    parser.add_argument('--hilbert', action='store_true', help='also print the Hilbert-space rate for diam = b')
    parser.add_argument('--hilbert-only', action='store_true', help='only the Hilbert-space rate (with --diam)')
    parser.add_argument('--diam', type=float)
    parser.add_argument('--precision', type=int, default=6)
    return parser


def cmd_rate(parser, args):
    eps = positive('eps', args.eps)
    with open_output(args.output) as handle:
        if args.hilbert_only:
            diam = positive('diam', args.diam)
            handle.write('%d\n' % (hilbert_rate(eps, diam),))
            return EXIT_OK

        b = positive('b', args.b)
        m = parse_modulus(args.modulus)
        if (args.q is None) != (args.C_q is None):
            raise UsageError("--q and --Cq go together")
        if args.q is not None:
            plan = rate_plan(eps, b, m, q=args.q, C_q=args.C_q, method=args.method)
        else:
            profile = rademacher_profile(delta_from_modulus(m), args.theta)
            plan = rate_plan(eps, b, m, profile=profile, method=args.method)

        if args.format == 'csv':
            handle.write(RatePlan.csv_header() + '\n')
            handle.write(plan.csv_row(args.precision) + '\n')
        else:
            handle.write('\n'.join(plan.lines(args.precision)) + '\n')
        if args.hilbert:
            handle.write('hilbert_rate=%d\n' % (hilbert_rate(eps, b),))
    return EXIT_OK


def main(*argv):
    """Prints the rate plan p~, delta, p, alpha, N"""
    return run(build_parser(), cmd_rate, argv)


if __name__ == "__main__":
    sys.exit(main(*sys.argv[1:]))
