import sys

from .. import verify
from ..moduli import parse_modulus, DerivedModuli
from ..pisier import rademacher_profile, delta_from_modulus, DEFAULT_THETA
from ..spaces import parse_map
from ..rng import DEFAULT_SEED
from .utils import (base_parser, run, open_output, parse_space, positive, UsageError,
                    EXIT_OK, EXIT_VIOLATION)


CHECKS = ('rademacher', 'kahane', 'nonsquare', 'modulus', 'mean-zero', 'maurey', 'hull',
          'gamma', 'mu2', 'nu2', 'moments', 'drift', 'lemmas')


def build_parser():
    parser = base_parser('cesaro verify', 'Exhaustive and sampled checks of the underlying inequalities')
    parser.add_argument('check', choices=CHECKS)
    parser.add_argument('--space', default='l2:2', help='l<p>:<dim>, e.g. l2:8, l1:2, linf:3')
    parser.add_argument('--modulus', default='hilbert')
    parser.add_argument('--theta', type=float, default=DEFAULT_THETA)
    parser.add_argument('--n', type=int, default=4, help='points per batch')
    parser.add_argument('--q', type=float)
    parser.add_argument('--Cq', dest='C_q', type=float)
    parser.add_argument('--K', type=float, help='override the Kahane constant')
    parser.add_argument('--delta', type=float)
    parser.add_argument('--lam', type=float)
    parser.add_argument('--xi', type=float)
    parser.add_argument('--eps', type=float)
    parser.add_argument('--b', type=float, default=2.0)
    parser.add_argument('--map', default='identity')
    parser.add_argument('--nvars', type=int, default=2)
    parser.add_argument('--ptilde', type=int, default=100)
    parser.add_argument('--batches', type=int, default=10, help='random point sets for maurey')
    parser.add_argument('--trials', type=int, default=1000,
                        help='random batches for sign-enumeration checks, sampled pairs or draws otherwise')
    parser.add_argument('--seed', type=int, default=DEFAULT_SEED)
    parser.add_argument('--sampled', action='store_true', help='Monte Carlo over sign vectors')
    return parser


def _profile(args, modulus):
    return rademacher_profile(delta_from_modulus(modulus), args.theta)


def _type_constants(args, modulus):
    if (args.q is None) != (args.C_q is None):
        raise UsageError("--q and --Cq go together")
    if args.q is not None:
        return args.q, args.C_q
    profile = _profile(args, modulus)
    return profile.q, profile.C_q


def _verdicts(args):
    space = parse_space(args.space)
    m = parse_modulus(args.modulus)
    trials = int(positive('trials', args.trials))
    seed = args.seed
    b = positive('b', args.b)
    check = args.check

    if check == 'rademacher':
        q, C_q = _type_constants(args, m)
        return [verify.rademacher_suite(space, args.n, q, C_q, trials, seed, sampled=args.sampled)]
    if check == 'kahane':
        q = args.q if args.q is not None else 2.0
        return [verify.kahane_suite(space, args.n, q, trials, seed, K=args.K)]
    if check == 'moments':
        q = args.q if args.q is not None else _profile(args, m).q
        return [verify.moments_suite(space, args.n, q, trials, seed)]
    if check == 'mean-zero':
        q, C_q = _type_constants(args, m)
        return [verify.mean_zero_suite(space, args.n, args.nvars, q, C_q, trials, seed)]
    if check == 'maurey':
        q, C_q = _type_constants(args, m)
        return [verify.maurey_suite(space, args.n, args.ptilde, q, C_q, b, args.batches, trials, seed)]
    if check == 'nonsquare':
        delta = args.delta if args.delta is not None else delta_from_modulus(m)
        return [verify.nonsquare_check(space, delta, trials, seed, pairs=verify.basis_pairs(space))]
    if check == 'modulus':
        return [verify.modulus_check(space, m, trials, seed, pairs=verify.basis_pairs(space))]
    if check == 'mu2':
        lam = args.lam if args.lam is not None else 1.0 - delta_from_modulus(m)
        return [verify.mu2_estimate_check(space, lam, trials, seed, pairs=verify.basis_pairs(space))]
    if check == 'nu2':
        xi = args.xi if args.xi is not None else _profile(args, m).xi_prob
        return [verify.nu2_estimate_check(space, xi, trials, seed, pairs=verify.basis_pairs(space))]
    if check == 'lemmas':
        return verify.lemma_suite(DerivedModuli(m, b), trials, seed)

    radius = 0.5 * b
    T = parse_map(args.map, space, radius)
    if check == 'gamma':
        e1 = verify.basis_points(space, 1, radius)[0]
        triples = [(e1, -e1, 0.5)]
        return [verify.type_gamma_check(space, T, DerivedModuli(m, b), trials, radius, seed, triples=triples)]
    eps = positive('eps', args.eps)
    delta = args.delta if args.delta is not None else eps / 3.0
    if check == 'hull':
        return [verify.convex_hull_afp_check(space, T, delta, eps, trials, radius, seed)]
    return [verify.orbit_drift_check(space, T, delta, radius, trials, seed=seed)]


def cmd_verify(parser, args):
    verdicts = _verdicts(args)
    with open_output(args.output) as handle:
        if args.format == 'csv':
            handle.write(verify.Verdict.csv_header() + '\n')
            for verdict in verdicts:
                handle.write(verdict.csv_row() + '\n')
        else:
            for verdict in verdicts:
                handle.write('\n'.join(verdict.lines()) + '\n')
    if all(_.passed for _ in verdicts):
        return EXIT_OK
    return EXIT_VIOLATION


def main(*argv):
    """Runs one check family; exit status 0 when every verdict passed, 1 otherwise"""
    return run(build_parser(), cmd_verify, argv)


if __name__ == "__main__":
    sys.exit(main(*sys.argv[1:]))
