import sys

from ..moduli import parse_modulus
from ..pisier import (rademacher_profile, rademacher_profile_mp, delta_from_modulus,
                      RademacherProfile, DEFAULT_THETA)
from .utils import base_parser, run, open_output, UsageError, EXIT_OK


def build_parser():
    parser = base_parser('cesaro pisier', 'Rademacher type q and constant C_q from a nonsquareness witness')
    source = parser.add_mutually_exclusive_group()
    source.add_argument('--delta', type=float, help='nonsquareness witness in (0,1)')
    source.add_argument('--modulus', help='modulus of convexity, delta = eta(1)')
    parser.add_argument('--theta', type=float, default=DEFAULT_THETA, help='q = 1 + theta (p - 1)')
    parser.add_argument('--mp', action='store_true', help='add a 50-digit re-derivation')
    return parser


def cmd_pisier(parser, args):
    if args.delta is None and args.modulus is None:
        args.modulus = 'hilbert'
    if args.delta is not None:
        delta = args.delta
        if not 0 < delta < 1:
            raise UsageError("--delta must lie in (0,1), got %r" % (delta,))
    else:
        delta = delta_from_modulus(parse_modulus(args.modulus))
    profile = rademacher_profile(delta, args.theta)
    with open_output(args.output) as handle:
        if args.format == 'csv':
            handle.write(','.join(RademacherProfile._fields) + '\n')
            handle.write(','.join(repr(float(_)) for _ in profile) + '\n')
        else:
            handle.write('\n'.join(profile.lines()) + '\n')
            if args.mp:
                exact = rademacher_profile_mp(delta, args.theta)
                for key in ('xi_prob', 'p_prime', 'p_conj', 'q', 'C_q'):
                    handle.write('mp.%s=%s\n' % (key, str(getattr(exact, key))))
    return EXIT_OK


def main(*argv):
    """Prints the constants of the Rademacher type pipeline"""
    return run(build_parser(), cmd_pisier, argv)


if __name__ == "__main__":
    sys.exit(main(*sys.argv[1:]))
