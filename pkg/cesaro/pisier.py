# License: LGPL-3.0+

"""
Rademacher type of uniformly nonsquare spaces, with explicit constants.

Starting from a nonsquareness witness delta (for a uniformly convex space,
delta = eta(1)) the pipeline is

    lambda = 1 - delta
    mu2    <= 1/2 * sqrt(2 lambda^2 + 2)
    xi     =  largest xi with (1 - xi) / (1 + 2 sqrt(2 xi)) >= mu2
    p'     =  smallest p' >= 2 with 2^(-1/p') >= 1 - xi
    p      =  p' / (p' - 1)
    q      =  1 + theta (p - 1),  for a free theta in (0,1)
    C_q    =  3 * 2^(1/q) / (2^(1/q - 1/p) - 1)

and the space has Rademacher type q with constant C_q:

    (E || sum eps_i x_i ||^q)^(1/q) <= C_q (sum ||x_i||^q)^(1/q)        (*)

Every q close to 1 makes p - 1 tiny; the code never forms 1/q - 1/p or
2^d - 1 by subtraction of nearby floats.
"""

import math
import logging
from collections import namedtuple

import mpmath
from scipy import optimize

from .errors import ConstantError


log = logging.getLogger(__name__)

DEFAULT_THETA = 0.5
DEFAULT_DPS = 50

# Kahane-Khintchine constant at q = 2
K2 = 3.0

TYPE_TO_MOMENT = '*->**'
MOMENT_TO_TYPE = '**->*'


class RademacherProfile(namedtuple('_RademacherProfile', ('delta', 'lam', 'mu2_bound', 'xi_prob', 'p_prime',
                                                         'p_conj', 'q', 'C_q', 'K_q', 'c_q', 'sum_constant', 'theta'))):
    def as_dict(self):
        return self._asdict()

    def lines(self):
        """key=value rendering, one constant per line"""
        return ['%s=%r' % (key, float(value)) for key, value in self._asdict().items()]


def delta_from_modulus(m):
    """
    A uniformly convex space with modulus eta is uniformly nonsquare with delta = eta(1)
    """
    value = m.eta(1.0)
    if not (0 < value <= 1):
        raise ConstantError("eta(1) = %r is outside (0,1]" % (value,))
    if value > 0.5:
        # the midpoint of x and -x already bounds eta(1) by 1/2 in any normed space
        raise ConstantError("eta(1) = %r exceeds 1/2, %s is not a modulus of any normed space" % (value, m))
    return value


def lambda_from_delta(delta):
    if not (0 < delta < 1):
        raise ConstantError("delta must lie in (0,1), got %r" % (delta,))
    if delta > 0.5:
        log.warning("delta=%r above 1/2 cannot come from a modulus of convexity", delta)
    return 1.0 - delta


def mu2_bound(lam):
    if not (0 <= lam < 1):
        raise ConstantError("lambda must lie in [0,1), got %r" % (lam,))
    return 0.5 * math.sqrt(2.0 * lam * lam + 2.0)


def nu2_bound(xi):
    """Bound on nu_2 = inf { max P(||eps_1 x_1 + eps_2 x_2|| ...) } implied by the xi constraint"""
    if not (0 < xi < 1):
        raise ConstantError("xi must lie in (0,1), got %r" % (xi,))
    return 1.0 - xi


def _xi_constraint(xi):
    return (1.0 - xi) / (1.0 + 2.0 * math.sqrt(2.0 * xi))


def solve_xi(mu2):
    """
    Largest xi in (0,1) with (1 - xi)/(1 + 2 sqrt(2 xi)) >= mu2

    The left side decreases strictly from 1 at xi=0 to 0 at xi=1; the
    bisection result is stepped toward 0 until the constraint holds exactly.
    """
    if not (0 < mu2 < 1):
        raise ConstantError("mu2 must lie in (0,1), got %r" % (mu2,))
    xi = optimize.bisect(lambda x: _xi_constraint(x) - mu2, 0.0, 1.0, xtol=1e-300, maxiter=4000)
    steps = 0
    while xi > 0 and _xi_constraint(xi) < mu2:
        xi = math.nextafter(xi, 0.0)
        steps += 1
    if xi <= 0:
        raise ConstantError("No positive xi satisfies the constraint for mu2=%r" % (mu2,))
    log.debug("solve_xi: mu2=%r xi=%r (%d inward steps)", mu2, xi, steps)
    return xi


def min_p_prime(xi):
    """Least p' >= 2 with 2^(-1/p') >= 1 - xi"""
    if not (0 < xi < 1):
        raise ConstantError("xi must lie in (0,1), got %r" % (xi,))
    p_prime = max(2.0, -math.log(2.0) / math.log1p(-xi))
    while 2.0 ** (-1.0 / p_prime) < 1.0 - xi:
        p_prime = math.nextafter(p_prime, math.inf)
    return p_prime


def kahane_constant(q):
    """K_q with (E||sum eps_i x_i||^q)^(1/q) <= K_q (E||sum eps_i x_i||)"""
    if not q > 1:
        raise ConstantError("Kahane constant diverges for q <= 1, got %r" % (q,))
    return ((2.0 * q - 1.0) / (q - 1.0)) ** (q - 1.0)


def c_nq_constant(N, q, p):
    """
    K_2 * N^(1/q) / (N^(1/q - 1/p) - 1), valid whenever nu_N <= N^(-1/p');
    the type constant C_q is the case N = 2
    """
    if not isinstance(N, int) or N < 2:
        raise ConstantError("N must be an integer >= 2")
    if not (1 < q < p):
        raise ConstantError("Need 1 < q < p, got q=%r p=%r" % (q, p))
    gap = (p - q) / (p * q)
    return K2 * N ** (1.0 / q) / math.expm1(gap * math.log(N))


def convert_constants(value, direction=TYPE_TO_MOMENT):
    """
    Move a type constant between the two forms of type q

        (*)   (E||sum eps_i x_i||^q)^(1/q) <= C (sum ||x_i||^q)^(1/q)
        (**)   E||sum eps_i x_i||          <= c (sum ||x_i||^q)^(1/q)

    (*) implies (**) with the same constant; (**) implies (*) with K_2 times it.
    """
    if value < 0:
        raise ValueError("Constants are non-negative")
    if direction == TYPE_TO_MOMENT:
        return K2 * value
    if direction == MOMENT_TO_TYPE:
        return value
    raise ValueError("Unknown conversion direction %r" % (direction,))


def _check_theta(theta):
    if not (0 < theta < 1):
        raise ConstantError("theta must lie in (0,1), got %r" % (theta,))


def rademacher_profile(delta, theta=DEFAULT_THETA):
    _check_theta(theta)
    lam = lambda_from_delta(delta)
    mu2 = mu2_bound(lam)
    xi = solve_xi(mu2)
    p_prime = min_p_prime(xi)
    # p - 1 = 1/(p' - 1), kept as a difference to avoid cancellation
    p_minus_1 = 1.0 / (p_prime - 1.0)
    p_conj = 1.0 + p_minus_1
    q = 1.0 + theta * p_minus_1
    if not (1 < q < p_conj) or q > 2:
        raise ConstantError("Extracted q=%r is not in (1, min(p, 2)]" % (q,))
    gap = (1.0 - theta) * p_minus_1 / (p_conj * q)   # 1/q - 1/p
    C_q = 3.0 * 2.0 ** (1.0 / q) / math.expm1(gap * math.log(2.0))
    K_q = kahane_constant(q)
    log.debug("rademacher_profile: delta=%r xi=%r p'=%r q=%r C_q=%r", delta, xi, p_prime, q, C_q)
    return RademacherProfile(delta, lam, mu2, xi, p_prime, p_conj, q, C_q, K_q,
                             convert_constants(C_q, TYPE_TO_MOMENT), 2.0 * C_q, theta)


def rademacher_profile_mp(delta, theta=DEFAULT_THETA, dps=DEFAULT_DPS):
    """
    The same pipeline in mpmath at `dps` digits, solving the xi constraint in
    closed form: with r = sqrt(2 xi) it is the quadratic r^2/2 + 2 mu2 r - (1 - mu2) = 0
    """
    _check_theta(theta)
    if not (0 < delta < 1):
        raise ConstantError("delta must lie in (0,1), got %r" % (delta,))
    with mpmath.workdps(dps):
        delta_mp = mpmath.mpf(delta)
        theta_mp = mpmath.mpf(theta)
        lam = 1 - delta_mp
        mu2 = mpmath.sqrt(2 * lam ** 2 + 2) / 2
        r = -2 * mu2 + mpmath.sqrt(4 * mu2 ** 2 + 2 * (1 - mu2))
        xi = r ** 2 / 2
        p_prime = mpmath.mpf(2)
        candidate = -mpmath.log(2) / mpmath.log1p(-xi)
        if candidate > p_prime:
            p_prime = candidate
        p_minus_1 = 1 / (p_prime - 1)
        p_conj = 1 + p_minus_1
        q = 1 + theta_mp * p_minus_1
        gap = (1 - theta_mp) * p_minus_1 / (p_conj * q)
        C_q = 3 * mpmath.power(2, 1 / q) / mpmath.expm1(gap * mpmath.log(2))
        K_q = mpmath.power((2 * q - 1) / (q - 1), q - 1)
        return RademacherProfile(delta_mp, lam, mu2, xi, p_prime, p_conj, q, C_q, K_q,
                                 3 * C_q, 2 * C_q, theta_mp)
