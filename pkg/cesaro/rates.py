# License: LGPL-3.0+

"""
Rate of asymptotic regularity for Cesaro means of nonexpansive maps.

For a bounded closed convex C of norm bound b/2 in a uniformly convex space
with modulus eta, and an error eps > 0, the pipeline is

    xi(t)   = t/12 * eta(min(2, t/b))
    p~      = least n with 2 C_q n^((1-q)/q) <= eps / (9b)
    delta   = xi^p~(eps/9)                       (p~-fold iterate of xi)
    p       = ceil(2b / delta^2)
    alpha   = min(xi^(p-1)(delta^2/2), eps/3), scaled below by 2^-20
    N       = ceil(b / alpha)

after which every Cesaro mean of T, and of every alpha-approximate orbit, has
||T x_n - x_n|| < eps for all n >= N.

The numbers involved are towers of exponents; everything past p~ is done in
leveled-magnitude arithmetic on base-10 logarithms. Iterates of xi along a
power branch eta(e) = c e^s follow the affine recurrence

    l_{j+1} = a + (1+s) l_j,    a = log10(c / (12 b^s))

which has the closed form l_k = (1+s)^k (l_0 + a/s) - a/s (s > 0), or
l_k = l_0 + k a (s = 0), evaluated for k far beyond any native integer.
"""

import math
import logging
from collections import namedtuple

from .errors import ConstantError, IterationError, PlanError
from .magnitude import (LeveledMagnitude, SignedMagnitude, LEVEL0_MAX, UNIT, HUGE,
                        lm_from_float, lm_log10, lm_exp10, lm_mul, lm_pow,
                        lm_recip, lm_ceil, format_magnitude, _coerce)


log = logging.getLogger(__name__)

EXPLICIT_LIMIT = 10**6
LEADING_STEP_LIMIT = 10**4
ALPHA_MARGIN = 2.0 ** -20
RECHECK_TOLERANCE = 1e-9

AUTO = 'auto'
CLOSED = 'closed'
EXPLICIT = 'explicit'

_LN10 = math.log(10.0)
_LOG10_12 = math.log10(12.0)


def _log10_of(t):
    """log10 of a positive float or LeveledMagnitude, as a SignedMagnitude"""
    t = _coerce(t)
    if t.is_zero():
        raise ValueError("Argument must be positive")
    return lm_log10(t)


def _as_float_if_small(value):
    if isinstance(value, SignedMagnitude) and value.magnitude.level == 0:
        return value.to_float()
    return value


def _shrink_log(m, b, l):
    """log10 xi(t) from l = log10 t"""
    ratio = l - math.log10(b)
    if ratio >= math.log10(2.0):
        log_eta = math.log10(m.eta(2.0))
    else:
        u = _as_float_if_small(ratio * _LN10)
        value = m.log_eta(u)
        if isinstance(value, SignedMagnitude):
            log_eta = value.scale(1.0 / _LN10)
        else:
            log_eta = value / _LN10
    return l + (-_LOG10_12) + log_eta


def shrink_xi(m, b, t):
    """
    xi(t) = t/12 * eta(min(2, t/b)); floats in, float out, otherwise
    through the log domain
    """
    if b <= 0:
        raise ValueError("Norm bound b must be positive")
    if isinstance(t, LeveledMagnitude):
        if t.is_zero():
            raise ValueError("xi needs t > 0")
        return lm_exp10(_shrink_log(m, b, _log10_of(t)))
    if not t > 0:
        raise ValueError("xi needs t > 0")
    return t / 12.0 * m.eta(min(2.0, t / b))


def _native_count(k):
    """k as a python int if it fits exactly, otherwise None"""
    if isinstance(k, LeveledMagnitude):
        if k.level == 0 and k.is_native_int() and k.mantissa <= 2.0 ** 53:
            return k.to_int()
        if k.level == 0:
            raise IterationError("Iteration count %s is not an integer" % (k,))
        if k.branch != HUGE:
            raise IterationError("Iteration count %s is not an integer" % (k,))
        return None
    if isinstance(k, bool) or not isinstance(k, int):
        raise TypeError("Iteration count must be an int or LeveledMagnitude")
    if k < 0:
        raise IterationError("Iteration count must be non-negative")
    return k


def _closed_form(m, b, l0, k):
    """
    Iterate along the power branch of m, from l0 = log10 t0 inside it
    """
    branch = m.power_branch()
    c, s = branch.c, branch.s
    if not branch.exact:
        log.warning("%s: closed-form iteration uses the power minorant %g*eps^%g", m, c, s)
    a = math.log10(c / 12.0) - s * math.log10(b)
    count = _coerce(k)
    if count.is_zero():
        return l0
    if s == 0:
        # geometric: l_k = l_0 + k a
        return l0 + SignedMagnitude(a < 0, lm_mul(count, lm_from_float(abs(a))))
    shift = a / s
    d0 = l0 + shift
    if d0.is_zero():
        return l0
    growth = lm_exp10(SignedMagnitude(False, lm_mul(count, lm_from_float(math.log10(1.0 + s)))))
    return SignedMagnitude(d0.negative, lm_mul(growth, d0.magnitude)) + (-shift)


def _in_branch(m, b, l):
    try:
        branch = m.power_branch()
    except NotImplementedError:
        return False
    ratio = l - math.log10(b)
    if branch.closed:
        return ratio <= math.log10(branch.eps_max)
    return ratio < math.log10(branch.eps_max)


def _has_closed_form(m):
    try:
        m.power_branch()
    except NotImplementedError:
        return False
    return True


def iterate_xi(m, b, t0, k, method=AUTO):
    """
    xi^k(t0) as a LeveledMagnitude

    `auto` iterates explicitly for native counts up to EXPLICIT_LIMIT and
    uses the closed power-branch recurrence beyond; `closed` and `explicit`
    force one or the other.
    """
    if method not in (AUTO, CLOSED, EXPLICIT):
        raise ValueError("Unknown iteration method %r" % (method,))
    if b <= 0:
        raise ValueError("Norm bound b must be positive")
    l = _log10_of(t0)
    native = _native_count(k)
    if native == 0:
        return _coerce(t0)

    use_explicit = method == EXPLICIT or (method == AUTO and native is not None and native <= EXPLICIT_LIMIT)
    if use_explicit:
        if native is None:
            raise IterationError("Explicit iteration needs a native integer count, got %s" % (k,))
        for _ in range(native):
            l = _shrink_log(m, b, l)
        return lm_exp10(l)

    if not _has_closed_form(m):
        raise IterationError("%s has no power branch; iterating it %s times needs a closed form" % (m, k))

    # explicit leading steps until t/b lies on the power branch
    steps = 0
    while not _in_branch(m, b, l):
        if steps >= LEADING_STEP_LIMIT:
            raise IterationError("Starting point %s does not reach the power branch of %s" % (t0, m))
        if native is not None and steps == native:
            return lm_exp10(l)
        l = _shrink_log(m, b, l)
        steps += 1
    if native is not None:
        remaining = native - steps
    else:
        # counts above 1e15 absorb the few leading steps
        remaining = k
    log.debug("iterate_xi: %d leading steps, closed form for %s more", steps, remaining)
    return lm_exp10(_closed_form(m, b, l, remaining))


def p_tilde(eps, b, q, C_q):
    """
    Least integer n with 2 C_q n^((1-q)/q) <= eps/(9b), i.e. n >= (18 b C_q / eps)^(q/(q-1))
    """
    if not (eps > 0 and b > 0):
        raise ValueError("eps and b must be positive")
    if not q > 1:
        raise ConstantError("p~ diverges for q <= 1")
    if C_q <= 0:
        raise ValueError("C_q must be positive")
    base = 18.0 * b * C_q / eps
    if base <= 1.0:
        return LeveledMagnitude.one()
    power = q / (q - 1.0)
    exponent = power * math.log10(base)
    if exponent < math.log10(LEVEL0_MAX):
        target = base ** power
        n = math.ceil(target)
        # undo a ceiling pushed up by rounding in base ** power
        if n > 1 and n - 1 >= target * (1.0 - 1e-12):
            n -= 1
        return LeveledMagnitude(0, UNIT, float(max(n, 1)))
    result = lm_exp10(SignedMagnitude.from_float(math.log10(base)).scale(power))
    return lm_ceil(result)


class RatePlan(namedtuple('_RatePlan', ('eps', 'b', 'q', 'C_q', 'p_tilde', 'delta', 'p', 'alpha', 'N',
                                       'modulus', 'margin_absorbed'))):
    MAGNITUDES = ('p_tilde', 'delta', 'p', 'alpha', 'N')
    CSV_FIELDS = ('modulus', 'eps', 'b', 'q', 'C_q', 'p_tilde', 'delta', 'p', 'alpha', 'N')

    def _render(self, key, precision=6):
        value = getattr(self, key)
        if key in self.MAGNITUDES:
            return format_magnitude(value, precision)
        if isinstance(value, float):
            return repr(value)
        return str(value)

    def lines(self, precision=6):
        out = [key + '=' + self._render(key, precision) for key in self.CSV_FIELDS]
        if self.margin_absorbed:
            out.append('margin_absorbed=true')
        return out

    @classmethod
    def csv_header(cls):
        return ','.join(cls.CSV_FIELDS)

    def csv_row(self, precision=6):
        cells = [self._render(key, precision) for key in self.CSV_FIELDS]
        return ','.join('"%s"' % (_,) if ',' in _ else _ for _ in cells)


def _minus_one(k):
    native = _native_count(k)
    if native is None:
        return k
    return native - 1


def _check(condition, message):
    if not condition:
        raise PlanError(message)


def _recheck(plan, xi_bound):
    eps, b, q, C_q = plan.eps, plan.b, plan.q, plan.C_q
    rhs = math.log10(eps / (9.0 * b))
    lhs = lm_log10(plan.p_tilde).scale((1.0 - q) / q) + math.log10(2.0 * C_q)
    _check(lhs <= rhs + RECHECK_TOLERANCE * max(1.0, abs(rhs)),
           "p~=%s violates 2 C_q p~^((1-q)/q) <= eps/(9b)" % (plan.p_tilde,))
    _check(plan.p >= lm_mul(lm_from_float(2.0 * b), lm_pow(plan.delta, -2.0)),
           "p=%s is below 2b/delta^2" % (plan.p,))
    _check(not plan.alpha.is_zero(), "alpha vanished")
    bound = min(xi_bound, _coerce(eps / 3.0))
    if plan.margin_absorbed:
        _check(plan.alpha <= bound, "alpha=%s exceeds its bound %s" % (plan.alpha, bound))
    else:
        _check(plan.alpha < bound, "alpha=%s is not strictly below %s" % (plan.alpha, bound))
    _check(plan.N >= lm_mul(lm_from_float(b), lm_recip(plan.alpha)),
           "N=%s is below b/alpha" % (plan.N,))


def rate_plan(eps, b, m, profile=None, q=None, C_q=None, method=AUTO):
    """
    Run the whole pipeline; type constants come from a RademacherProfile or
    are given explicitly as (q, C_q)
    """
    if profile is not None:
        q, C_q = profile.q, profile.C_q
    if q is None or C_q is None:
        raise ValueError("rate_plan needs a profile or explicit q and C_q")
    if not (eps > 0 and b > 0):
        raise ValueError("eps and b must be positive")
    if eps > 2 * b:
        log.warning("eps=%r exceeds 2b=%r, every point is already an eps-fixed point", eps, 2 * b)

    pt = p_tilde(eps, b, q, C_q)
    log.debug("rate_plan: p~=%s", pt)
    delta = iterate_xi(m, b, eps / 9.0, pt, method)
    log.debug("rate_plan: delta=%s", delta)
    delta_sq = lm_pow(delta, 2.0)
    p = lm_ceil(lm_mul(lm_from_float(2.0 * b), lm_recip(delta_sq)))
    log.debug("rate_plan: p=%s", p)
    xi_bound = iterate_xi(m, b, lm_mul(delta_sq, lm_from_float(0.5)), _minus_one(p), method)
    alpha_max = min(xi_bound, _coerce(eps / 3.0))
    alpha = lm_mul(alpha_max, lm_from_float(1.0 - ALPHA_MARGIN))
    margin_absorbed = alpha == alpha_max
    if margin_absorbed:
        log.info("rate_plan: strictness margin below the precision of alpha=%s", alpha)
    N = lm_ceil(lm_mul(lm_from_float(b), lm_recip(alpha)))
    plan = RatePlan(float(eps), float(b), float(q), float(C_q), pt, delta, p, alpha, N,
                    str(m), margin_absorbed)
    _recheck(plan, xi_bound)
    return plan


def hilbert_rate(eps, diam):
    """Least n with diam / sqrt(n) <= eps"""
    if not (eps > 0 and diam > 0):
        raise ValueError("eps and diam must be positive")
    if eps >= diam:
        return 1
    n = math.ceil((diam / eps) ** 2)
    while n > 1 and diam / math.sqrt(n - 1) <= eps:
        n -= 1
    while diam / math.sqrt(n) > eps:
        n += 1
    return int(n)
