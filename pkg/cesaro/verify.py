# License: LGPL-3.0+

"""
Exhaustive and sampled verifiers for the inequalities behind the constants.

Every check returns a `Verdict`. Per trial the slack is

    (RHS - LHS) / max(1, |RHS|)

and a check passes when its worst slack is at least -TOLERANCE. The witness
is the full input of the worst trial, enough to replay it standalone.

Expectations over random signs are computed exactly for up to 20 terms, by
enumerating the 2^(n-1) sign patterns with the first sign fixed (norms are
even in the sign vector). Beyond that, or when asked, a seeded Monte Carlo
average is used and its standard error reported.

The discrete mean-zero variables take the value (x_j - x)/n_vars with
probability lambda_j, where x = sum_j lambda_j x_j and n_vars is the number
of variables, the normalisation the Maurey argument uses. A literal reading
of the source remark divides by the type exponent q instead; with either
divisor the inequality is homogeneous, so the verdict does not change.
"""

import math
import logging
from collections import namedtuple

import numpy as np

from .errors import DomainError, SamplingError
from .pisier import kahane_constant, mu2_bound, nu2_bound
from .rates import shrink_xi
from .rng import stream, DEFAULT_SEED
from .spaces import cesaro_run


log = logging.getLogger(__name__)

TOLERANCE = 1e-9
MAX_EXHAUSTIVE_TERMS = 20
EXHAUSTIVE_LIMIT = 10**6
SIGN_SAMPLES = 10**6
CHUNK = 1 << 16
MAX_SUMMANDS = 20
FIXED_POINT_STEPS = 10**4


class Verdict(namedtuple('_Verdict', ('check', 'passed', 'trials', 'worst_slack', 'witness', 'stderr', 'ties'),
                         defaults=(None,))):
    """
    `ties` counts trials of a strict inequality that hold only with equality,
    to within the tolerance; they are neither passes nor violations
    """
    def lines(self):
        out = ['check=%s' % (self.check,),
               'passed=%s' % ('true' if self.passed else 'false',),
               'trials=%d' % (self.trials,),
               'worst_slack=%r' % (float(self.worst_slack),)]
        if self.stderr is not None:
            out.append('stderr=%r' % (float(self.stderr),))
        if self.ties is not None:
            out.append('ties=%d' % (self.ties,))
        if self.witness is not None and not self.passed:
            for key in sorted(self.witness):
                out.append('witness.%s=%s' % (key, _render(self.witness[key])))
        return out

    @classmethod
    def csv_header(cls):
        return 'check,trials,worst_slack,passed'

    def csv_row(self):
        return '%s,%d,%r,%s' % (self.check, self.trials, float(self.worst_slack), 'true' if self.passed else 'false')


def _render(value):
    if isinstance(value, (list, tuple)):
        return '[' + ','.join(_render(_) for _ in value) + ']'
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _plain(value):
    """numpy values to nested lists of floats, for witnesses"""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def slack(lhs, rhs):
    rhs = np.asarray(rhs, dtype=float)
    return (rhs - np.asarray(lhs, dtype=float)) / np.maximum(1.0, np.abs(rhs))


class _Worst(object):
    """Running minimum of the slack, with the witness of the worst trial"""
    def __init__(self, check, tolerance=TOLERANCE, strict=False):
        self.check = check
        self.tolerance = tolerance
        self.strict = strict
        self.ties = 0
        self.trials = 0
        self.slack = math.inf
        self.witness = None
        self.stderr = None

    def update(self, slacks, witness):
        """`witness(i)` builds the witness of trial i, only called for a new worst"""
        slacks = np.atleast_1d(np.asarray(slacks, dtype=float))
        if slacks.size == 0:
            return
        self.trials += int(slacks.size)
        if self.strict:
            self.ties += int(np.sum(np.abs(slacks) <= self.tolerance))
        i = int(np.argmin(slacks))
        if slacks[i] < self.slack:
            self.slack = float(slacks[i])
            self.witness = {key: _plain(value) for key, value in witness(i).items()}

    def verdict(self):
        passed = self.slack >= -self.tolerance
        if not passed:
            log.info("%s failed: worst slack %r", self.check, self.slack)
        if self.strict and self.ties:
            log.info("%s: %d of %d trials hold only with equality", self.check, self.ties, self.trials)
        return Verdict(self.check, passed, self.trials, self.slack, self.witness, self.stderr,
                       self.ties if self.strict else None)


def combine(check, verdicts):
    """Reduce verdicts by minimum slack"""
    verdicts = list(verdicts)
    if not verdicts:
        return Verdict(check, True, 0, math.inf, None, None)
    worst = min(verdicts, key=lambda v: v.worst_slack)
    errors = [v.stderr for v in verdicts if v.stderr is not None]
    ties = [v.ties for v in verdicts if v.ties is not None]
    return Verdict(check, all(v.passed for v in verdicts), sum(v.trials for v in verdicts),
                   worst.worst_slack, worst.witness, max(errors) if errors else None,
                   sum(ties) if ties else None)


def _points(space, points):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    space.check(points)
    return points


def sign_patterns(n):
    """All 2^n sign vectors, one per row"""
    idx = np.arange(1 << n)
    return ((idx[:, None] >> np.arange(n)) & 1) * 2 - 1


def _exhaustive_moments(space, points, powers):
    """E ||sum eps_i x_i||^r for each r in powers, over all sign patterns"""
    n = len(points)
    if n > MAX_EXHAUSTIVE_TERMS:
        raise ValueError("Exhaustive sign enumeration is limited to %d terms, got %d" % (MAX_EXHAUSTIVE_TERMS, n))
    first, rest = points[0], points[1:]
    total = 1 << (n - 1)
    sums = [0.0 for _ in powers]
    for start in range(0, total, CHUNK):
        idx = np.arange(start, min(total, start + CHUNK))
        signs = ((idx[:, None] >> np.arange(n - 1)) & 1) * 2.0 - 1.0
        norms = space.norm(first + signs @ rest)
        for k, r in enumerate(powers):
            sums[k] += float(np.sum(norms ** r))
    return [s / total for s in sums], [0.0 for _ in powers]


def _sampled_moments(space, points, powers, samples, seed, label):
    """Monte Carlo version, with the standard error of each moment"""
    n = len(points)
    acc = np.zeros(len(powers))
    acc2 = np.zeros(len(powers))
    done = 0
    for block, start in enumerate(range(0, samples, CHUNK)):
        count = min(CHUNK, samples - start)
        rng = stream(seed, label, block)
        signs = rng.choice((-1.0, 1.0), size=(count, n))
        norms = space.norm(signs @ points)
        for k, r in enumerate(powers):
            values = norms ** r
            acc[k] += np.sum(values)
            acc2[k] += np.sum(values * values)
        done += count
    means = acc / done
    variances = np.maximum(acc2 / done - means ** 2, 0.0)
    return list(means), list(np.sqrt(variances / done))


def _moments(space, points, powers, sampled, samples, seed, label):
    if sampled or len(points) > MAX_EXHAUSTIVE_TERMS:
        if not sampled:
            raise ValueError("%d terms exceed exhaustive enumeration; use sampled mode" % (len(points),))
        return _sampled_moments(space, points, powers, samples, seed, label)
    return _exhaustive_moments(space, points, powers)


def rademacher_check(space, points, q, C_q, sampled=False, samples=SIGN_SAMPLES, seed=DEFAULT_SEED,
                     tolerance=TOLERANCE):
    """
    (E ||sum eps_i x_i||^q)^(1/q) <= C_q (sum ||x_i||^q)^(1/q)
    """
    points = _points(space, points)
    (moment,), (error,) = _moments(space, points, [q], sampled, samples, seed, b'rademacher')
    lhs = moment ** (1.0 / q)
    rhs = C_q * float(np.sum(space.norm(points) ** q)) ** (1.0 / q)
    stderr = None
    if sampled:
        # delta method, and three standard errors of room on the estimate
        stderr = error / (q * moment ** ((q - 1.0) / q)) if moment > 0 else 0.0
        rhs_eff = rhs + 3.0 * stderr
    else:
        rhs_eff = rhs
    worst = _Worst('rademacher', tolerance)
    worst.update(slack(lhs, rhs_eff), lambda i: dict(points=points, q=q, C_q=C_q, lhs=lhs, rhs=rhs))
    worst.stderr = stderr
    return worst.verdict()


def rademacher_sampled_check(space, points, q, C_q, samples=SIGN_SAMPLES, seed=DEFAULT_SEED):
    return rademacher_check(space, points, q, C_q, sampled=True, samples=samples, seed=seed)


def kahane_check(space, points, q, K=None, tolerance=TOLERANCE):
    """
    E||S|| <= (E||S||^q)^(1/q) <= K_q E||S||  for S = sum eps_i x_i
    """
    if not q > 1:
        raise ValueError("kahane_check needs q > 1")
    points = _points(space, points)
    K = kahane_constant(q) if K is None else K
    (first, moment), _ = _exhaustive_moments(space, points, [1.0, q])
    middle = moment ** (1.0 / q)
    worst = _Worst('kahane', tolerance)
    worst.update([min(slack(first, middle), slack(middle, K * first))],
                 lambda i: dict(points=points, q=q, K=K, first_moment=first, q_moment=middle))
    return worst.verdict()


def moment_comparison_check(space, points, q, tolerance=TOLERANCE):
    """(E||S||^q)^(1/q) <= (E||S||^2)^(1/2) for 1 <= q <= 2"""
    if not 1 <= q <= 2:
        raise ValueError("moment comparison needs 1 <= q <= 2")
    points = _points(space, points)
    (moment, second), _ = _exhaustive_moments(space, points, [q, 2.0])
    lhs, rhs = moment ** (1.0 / q), math.sqrt(second)
    worst = _Worst('moments', tolerance)
    worst.update(slack(lhs, rhs), lambda i: dict(points=points, q=q, lhs=lhs, rhs=rhs))
    return worst.verdict()


def _pairs(space, trials, seed, label, pairs=None, radius=1.0):
    """Sampled pairs in the ball, in seeded chunks, followed by explicit basis pairs"""
    for block, start in enumerate(range(0, trials, CHUNK)):
        count = min(CHUNK, trials - start)
        rng = stream(seed, label, block)
        yield space.random_ball(rng, count, radius), space.random_ball(rng, count, radius)
    if pairs:
        x = np.array([_[0] for _ in pairs], dtype=float)
        y = np.array([_[1] for _ in pairs], dtype=float)
        space.check(x)
        space.check(y)
        yield x, y


def nonsquare_check(space, delta, trials, seed=DEFAULT_SEED, pairs=None, tolerance=TOLERANCE):
    """
    min(||x-y||, ||x+y||) / 2 <= (1 - delta) max(||x||, ||y||)
    """
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0,1]")
    worst = _Worst('nonsquare', tolerance)
    for x, y in _pairs(space, trials, seed, b'nonsquare', pairs):
        lhs = 0.5 * np.minimum(space.dist(x, y), space.norm(x + y))
        rhs = (1.0 - delta) * np.maximum(space.norm(x), space.norm(y))
        worst.update(slack(lhs, rhs), lambda i: dict(x=x[i], y=y[i], delta=delta, lhs=lhs[i], rhs=rhs[i]))
    return worst.verdict()


def modulus_check(space, m, trials, seed=DEFAULT_SEED, pairs=None, tolerance=TOLERANCE):
    """
    ||x||, ||y|| <= 1 and eps = ||x - y|| > 0  imply  ||(x+y)/2|| <= 1 - eta(eps)
    """
    worst = _Worst('modulus', tolerance)
    for x, y in _pairs(space, trials, seed, b'modulus', pairs):
        eps = space.dist(x, y)
        keep = eps > 0
        x, y, eps = x[keep], y[keep], eps[keep]
        lhs = space.norm(0.5 * (x + y))
        rhs = 1.0 - np.array([m.eta(min(2.0, e)) for e in eps])
        worst.update(slack(lhs, rhs), lambda i: dict(x=x[i], y=y[i], eps=eps[i], lhs=lhs[i], rhs=rhs[i],
                                                     modulus=str(m)))
    return worst.verdict()


def _second_moment_pair(space, x, y):
    """(E||eps_1 x + eps_2 y||^2)^(1/2) for pairs"""
    return np.sqrt(0.5 * (space.norm(x + y) ** 2 + space.dist(x, y) ** 2))


def mu2_estimate_check(space, lam, trials, seed=DEFAULT_SEED, pairs=None, tolerance=TOLERANCE):
    """
    sup of (E||eps_1 x_1 + eps_2 x_2||^2)^(1/2) / (2 max ||x_i||) against 1/2 sqrt(2 lambda^2 + 2)
    """
    bound = mu2_bound(lam)
    worst = _Worst('mu2', tolerance)
    for x, y in _pairs(space, trials, seed, b'mu2', pairs):
        top = np.maximum(space.norm(x), space.norm(y))
        keep = top > 0
        x, y, top = x[keep], y[keep], top[keep]
        ratio = _second_moment_pair(space, x, y) / (2.0 * top)
        worst.update(slack(ratio, bound), lambda i: dict(x1=x[i], x2=y[i], ratio=ratio[i], bound=bound))
    return worst.verdict()


def nu2_estimate_check(space, xi, trials, seed=DEFAULT_SEED, pairs=None, tolerance=TOLERANCE):
    """
    sup of (E||eps_1 x_1 + eps_2 x_2||^2)^(1/2) / (sqrt 2 (||x_1||^2 + ||x_2||^2)^(1/2)) against 1 - xi
    """
    bound = nu2_bound(xi)
    worst = _Worst('nu2', tolerance)
    for x, y in _pairs(space, trials, seed, b'nu2', pairs):
        scale = np.sqrt(2.0 * (space.norm(x) ** 2 + space.norm(y) ** 2))
        keep = scale > 0
        x, y, scale = x[keep], y[keep], scale[keep]
        ratio = _second_moment_pair(space, x, y) / scale
        worst.update(slack(ratio, bound), lambda i: dict(x1=x[i], x2=y[i], ratio=ratio[i], bound=bound))
    return worst.verdict()


def _check_weights(weights, count):
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (count,):
        raise ValueError("Need one weight per point")
    if np.any(weights < 0) or abs(float(np.sum(weights)) - 1.0) > 1e-12:
        raise ValueError("Weights must be non-negative and sum to 1")
    return weights


def mean_zero_sum_check(space, weights, points, q, C_q, n_vars, exhaustive_limit=EXHAUSTIVE_LIMIT,
                        samples=SIGN_SAMPLES, seed=DEFAULT_SEED, tolerance=TOLERANCE):
    """
    (E||sum X_i||^q)^(1/q) <= 2 C_q (sum E||X_i||^q)^(1/q) for n_vars i.i.d.
    mean-zero copies of X = (x_J - x)/n_vars, P(J = j) = lambda_j
    """
    points = _points(space, points)
    weights = _check_weights(weights, len(points))
    if not isinstance(n_vars, int) or n_vars < 1:
        raise ValueError("n_vars must be a positive integer")
    center = weights @ points
    values = (points - center) / n_vars
    m = len(points)
    rhs = 2.0 * C_q * (n_vars * float(weights @ space.norm(values) ** q)) ** (1.0 / q)

    stderr = None
    outcomes = m ** n_vars
    if outcomes <= exhaustive_limit:
        total = 0.0
        for start in range(0, outcomes, CHUNK):
            flat = np.arange(start, min(outcomes, start + CHUNK))
            idx = np.stack(np.unravel_index(flat, (m,) * n_vars), axis=-1)
            probs = np.prod(weights[idx], axis=-1)
            sums = values[idx].sum(axis=1)
            total += float(probs @ space.norm(sums) ** q)
        lhs = total ** (1.0 / q)
        rhs_eff = rhs
    else:
        log.warning("mean_zero_sum_check: %d^%d outcomes, switching to %d Monte Carlo samples", m, n_vars, samples)
        acc = acc2 = 0.0
        for block, start in enumerate(range(0, samples, CHUNK)):
            count = min(CHUNK, samples - start)
            rng = stream(seed, b'mean_zero', block)
            idx = rng.choice(m, size=(count, n_vars), p=weights)
            moments = space.norm(values[idx].sum(axis=1)) ** q
            acc += float(np.sum(moments))
            acc2 += float(np.sum(moments * moments))
        mean = acc / samples
        error = math.sqrt(max(acc2 / samples - mean * mean, 0.0) / samples)
        lhs = mean ** (1.0 / q)
        stderr = error / (q * mean ** ((q - 1.0) / q)) if mean > 0 else 0.0
        rhs_eff = rhs + 3.0 * stderr
    worst = _Worst('mean-zero', tolerance)
    worst.update(slack(lhs, rhs_eff), lambda i: dict(points=points, weights=weights, q=q, C_q=C_q,
                                                     n_vars=n_vars, lhs=lhs, rhs=rhs))
    worst.stderr = stderr
    return worst.verdict()


def maurey_check(space, weights, points, p_tilde_small, q, C_q, b, trials, seed=DEFAULT_SEED,
                 tolerance=TOLERANCE):
    """
    Averages of p~ i.i.d. draws from the weights approach the convex combination:
    mean distance <= 2 C_q p~^((1-q)/q) b (+ 3 standard errors)
    """
    points = _points(space, points)
    weights = _check_weights(weights, len(points))
    if not isinstance(p_tilde_small, int) or p_tilde_small < 1:
        raise ValueError("p~ must be a positive integer")
    if np.any(space.norm(points) > 0.5 * b * (1 + TOLERANCE)):
        raise DomainError("maurey_check points must lie in the ball of radius b/2")
    target = weights @ points
    distances = []
    for block, start in enumerate(range(0, trials, CHUNK)):
        count = min(CHUNK, trials - start)
        rng = stream(seed, b'maurey', block)
        counts = rng.multinomial(p_tilde_small, weights, size=count)
        averages = counts @ points / p_tilde_small
        distances.append(space.dist(averages, target))
    distances = np.concatenate(distances)
    mean = float(np.mean(distances))
    stderr = float(np.std(distances) / math.sqrt(len(distances)))
    bound = 2.0 * C_q * p_tilde_small ** ((1.0 - q) / q) * b
    worst = _Worst('maurey', tolerance)
    worst.update([min(slack(mean, bound + 3.0 * stderr), float(np.min(slack(distances, b))))],
                 lambda i: dict(points=points, weights=weights, p_tilde=p_tilde_small, q=q, C_q=C_q, b=b,
                                mean_distance=mean, bound=bound, max_distance=float(np.max(distances))))
    worst.trials = trials
    worst.stderr = stderr
    return worst.verdict()


class ApproxFixedPointSet(object):
    """
    Samples of F_delta(T) = {x in C : ||x - T x|| <= delta}

    Half the draws are Cesaro means along orbits of random starting points in
    the domain, each taken at the first step where its residual is at most
    delta, so they spread over the whole set up to its edge. The rest are
    uniform in the ball of radius spread * delta around a fixed point of T
    (known, or the end of a long Cesaro run). Draws are kept when they lie
    in the domain and their residual is at most delta.
    """
    ROUNDS = 50
    ORBIT_STEPS = 500

    def __init__(self, space, T, delta, radius, spread=0.5, seed=DEFAULT_SEED):
        if delta < 0:
            raise ValueError("delta must be non-negative")
        self.space = space
        self.T = T
        self.delta = float(delta)
        self.radius = float(radius)
        self.spread = float(spread)
        center = T.fixed_point(space)
        if center is None:
            start = np.zeros(space.dim)
            center = cesaro_run(space, T, start, FIXED_POINT_STEPS, radius=radius, window=0,
                                every=FIXED_POINT_STEPS, seed=seed).mean
        self.center = np.asarray(center, dtype=float)
        residual = float(self.residual(self.center))
        if residual > self.delta * (1 + TOLERANCE):
            raise SamplingError("No point with residual <= %r found near %s (residual %r)"
                                % (self.delta, self.center.tolist(), residual))

    def residual(self, x):
        return self.space.dist(x, self.T(x))

    def describe(self):
        return 'F_delta(%s), delta=%r, ball of radius %r around %s' % (self.T, self.delta,
                                                                      self.spread * self.delta, self.center.tolist())

    def orbit_points(self, rng, count):
        """Cesaro means of random orbits where they first enter F_delta; fewer than count when some never do"""
        x = self.space.random_ball(rng, count, self.radius)
        total = np.zeros_like(x)
        found = np.zeros(count, dtype=bool)
        out = np.empty_like(x)
        for n in range(1, self.ORBIT_STEPS + 1):
            total += x
            mean = total / n
            hit = ~found & (self.residual(mean) <= self.delta)
            out[hit] = mean[hit]
            found |= hit
            if found.all():
                break
            x = self.T(x)
        return out[found]

    def sample(self, rng, count):
        out, have = [], 0
        for _ in range(self.ROUNDS):
            x = np.concatenate([self.orbit_points(rng, (count + 1) // 2),
                                self.space.random_ball(rng, count, self.spread * self.delta, self.center)])
            keep = (self.space.norm(x) <= self.radius) & (self.residual(x) <= self.delta)
            out.append(x[keep])
            have += int(np.sum(keep))
            if have >= count:
                pool = np.concatenate(out)
                return pool[rng.permutation(len(pool))[:count]]
        raise SamplingError("Only %d of %d samples of %s" % (have, count, self.describe()))


def _simplex(rng, k):
    w = rng.exponential(1.0, size=k)
    return w / np.sum(w)


def convex_hull_afp_check(space, T, delta, eps, samples, radius, seed=DEFAULT_SEED,
                          max_summands=MAX_SUMMANDS, tolerance=TOLERANCE):
    """
    Convex combinations of delta-approximate fixed points are eps/3-approximate
    fixed points, for delta small enough in terms of eps
    """
    afp = ApproxFixedPointSet(space, T, delta, radius, seed=seed)
    rng = stream(seed, b'convex_hull')
    bound = eps / 3.0
    worst = _Worst('hull', tolerance)
    for _ in range(samples):
        k = int(rng.integers(1, max_summands + 1))
        x = afp.sample(rng, k)
        w = _simplex(rng, k)
        y = w @ x
        residual = float(afp.residual(y))
        worst.update([slack(residual, bound)], lambda i: dict(points=x, weights=w, residual=residual,
                                                              delta=delta, eps=eps, map=str(T)))
    return worst.verdict()


def _triples(space, trials, seed, label, radius, triples):
    for block, start in enumerate(range(0, trials, CHUNK)):
        count = min(CHUNK, trials - start)
        rng = stream(seed, label, block)
        yield (space.random_ball(rng, count, radius), space.random_ball(rng, count, radius),
               rng.uniform(0.0, 1.0, size=count))
    if triples:
        x1 = np.array([_[0] for _ in triples], dtype=float)
        x2 = np.array([_[1] for _ in triples], dtype=float)
        lam = np.array([_[2] for _ in triples], dtype=float)
        space.check(x1)
        space.check(x2)
        yield x1, x2, lam


def type_gamma_check(space, T, d, trials, radius, seed=DEFAULT_SEED, triples=None, tolerance=TOLERANCE):
    """
    gamma(||T(l x1 + (1-l) x2) - (l T x1 + (1-l) T x2)||) <= ||x1 - x2|| - ||T x1 - T x2||
    """
    worst = _Worst('gamma', tolerance)
    for x1, x2, lam in _triples(space, trials, seed, b'type_gamma', radius, triples):
        l = lam[:, None]
        t1, t2 = T(x1), T(x2)
        defect = space.dist(T(l * x1 + (1 - l) * x2), l * t1 + (1 - l) * t2)
        lhs = np.array([d.gamma(float(_)) for _ in defect])
        rhs = space.dist(x1, x2) - space.dist(t1, t2)
        worst.update(slack(lhs, rhs), lambda i: dict(x1=x1[i], x2=x2[i], lam=lam[i], defect=defect[i],
                                                     lhs=lhs[i], rhs=rhs[i], map=str(T)))
    return worst.verdict()


def orbit_drift_check(space, T, delta, radius, trials, n_max=20, seed=DEFAULT_SEED, tolerance=TOLERANCE):
    """||T^n f - f|| <= n ||T f - f|| along orbits of approximate fixed points"""
    afp = ApproxFixedPointSet(space, T, delta, radius, seed=seed)
    rng = stream(seed, b'orbit_drift')
    f = afp.sample(rng, trials)
    step = afp.residual(f)
    worst = _Worst('drift', tolerance)
    x = f
    for n in range(1, n_max + 1):
        x = T(x)
        lhs = space.dist(x, f)
        rhs = n * step
        worst.update(slack(lhs, rhs), lambda i: dict(f=f[i], n=n, lhs=lhs[i], rhs=rhs[i], map=str(T)))
    worst.trials = trials
    return worst.verdict()


# Moduli and rate-function inequalities

def _log_uniform(rng, lo, hi, count):
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size=count))


def eta_tilde_check(d, trials, seed=DEFAULT_SEED, tolerance=TOLERANCE):
    """
    eta_tilde midpoint convexity, eta_tilde <= eta1 on (0,2], gamma(eps) <= eps
    and eta_tilde(eps) >= eps/4 * eta(min(2, eps/2))
    """
    rng = stream(seed, b'eta_tilde')
    a = rng.uniform(0.0, 4.0, size=trials)
    c = rng.uniform(0.0, 4.0, size=trials)
    m = d.modulus
    worst = _Worst('eta_tilde', tolerance)
    for i in range(trials):
        e1, e2 = float(a[i]), float(c[i])
        mid = d.eta_tilde(0.5 * (e1 + e2))
        convex = slack(mid, 0.5 * (d.eta_tilde(e1) + d.eta_tilde(e2)))
        value = d.eta_tilde(e1)
        checks = [convex, slack(d.gamma(e1), e1)]
        if e1 > 0:
            checks.append(slack(e1 / 4.0 * m.eta(min(2.0, e1 / 2.0)), value))
            if e1 <= 2:
                checks.append(slack(value, d.eta1(e1)))
        worst.update([min(checks)], lambda _: dict(a=e1, b=e2, modulus=str(m)))
    return worst.verdict()


def xi_gamma_check(d, trials, seed=DEFAULT_SEED, tolerance=TOLERANCE):
    """xi(eps) <= gamma(eps/2) / 3"""
    rng = stream(seed, b'xi_gamma')
    eps = _log_uniform(rng, 1e-6, 4.0 * d.b, trials)
    lhs = np.array([shrink_xi(d.modulus, d.b, float(e)) for e in eps])
    rhs = np.array([d.gamma(float(e) / 2.0) / 3.0 for e in eps])
    worst = _Worst('xi_gamma', tolerance)
    worst.update(slack(lhs, rhs), lambda i: dict(eps=eps[i], b=d.b, lhs=lhs[i], rhs=rhs[i], modulus=str(d.modulus)))
    return worst.verdict()


def _iterate(f, x, times):
    for _ in range(times):
        x = f(x)
    return x


def xi_sigma_check(d, trials, depth=5, seed=DEFAULT_SEED, tolerance=TOLERANCE):
    """xi^i(t) <= sigma^i(t) for i <= depth"""
    rng = stream(seed, b'xi_sigma')
    t = _log_uniform(rng, 1e-3, 2.0 * d.b, trials)
    worst = _Worst('xi_sigma', tolerance)
    for j in range(trials):
        x = s = float(t[j])
        for i in range(1, depth + 1):
            x = shrink_xi(d.modulus, d.b, x) if x > 0 else 0.0
            s = d.sigma(s)
            worst.update([slack(x, s)], lambda _: dict(t=t[j], i=i, xi=x, sigma=s, b=d.b, modulus=str(d.modulus)))
    worst.trials = trials
    return worst.verdict()


def lemma_q_tilde_check(d, trials, depth=5, seed=DEFAULT_SEED, tolerance=TOLERANCE):
    """
    t < xi^p(eps) implies q_tilde^p(t) < eps; equality within the tolerance
    is counted as a tie
    """
    rng = stream(seed, b'lemma_q_tilde')
    eps = _log_uniform(rng, 1e-3, 2.0 * d.b, trials)
    depths = rng.integers(1, depth + 1, size=trials)
    fractions = rng.uniform(0.0, 1.0, size=trials)
    worst = _Worst('lemma_q_tilde', tolerance, strict=True)
    for j in range(trials):
        e, p = float(eps[j]), int(depths[j])
        top = _iterate(lambda x: shrink_xi(d.modulus, d.b, x) if x > 0 else 0.0, e, p)
        t = float(fractions[j]) * top
        value = _iterate(d.q_tilde, t, p)
        worst.update([slack(value, e)], lambda _: dict(eps=e, p=p, t=t, q_tilde_p=value, b=d.b,
                                                       modulus=str(d.modulus)))
    return worst.verdict()


def lemma_q_n_check(d, trials, depth=5, seed=DEFAULT_SEED, tolerance=TOLERANCE):
    """q_n^p(eps) <= q_tilde^p(eps) whenever n >= b/eps"""
    rng = stream(seed, b'lemma_q_n')
    eps = _log_uniform(rng, 1e-3, 2.0 * d.b, trials)
    depths = rng.integers(1, depth + 1, size=trials)
    factors = rng.uniform(1.0, 10.0, size=trials)
    worst = _Worst('lemma_q_n', tolerance)
    for j in range(trials):
        e, p = float(eps[j]), int(depths[j])
        n = int(math.ceil(d.b / e * float(factors[j])))
        lhs = _iterate(lambda x: d.q_n(x, n), e, p)
        rhs = _iterate(d.q_tilde, e, p)
        worst.update([slack(lhs, rhs)], lambda _: dict(eps=e, p=p, n=n, lhs=lhs, rhs=rhs, b=d.b,
                                                       modulus=str(d.modulus)))
    return worst.verdict()


# Suites: random batches plus deterministic points built from basis vectors

def basis_points(space, n, scale=1.0):
    """The first n basis vectors (cycled), scaled"""
    eye = np.eye(space.dim)
    return scale * np.array([eye[i % space.dim] for i in range(n)])


def _batches(space, n, batches, seed, label, radius=1.0):
    yield basis_points(space, n, radius)
    for block in range(batches):
        rng = stream(seed, label, block)
        yield space.random_ball(rng, n, radius)


def rademacher_suite(space, n, q, C_q, batches, seed=DEFAULT_SEED, sampled=False):
    return combine('rademacher', (rademacher_check(space, points, q, C_q, sampled=sampled, seed=seed)
                                  for points in _batches(space, n, batches, seed, b'rademacher_suite')))


def kahane_suite(space, n, q, batches, seed=DEFAULT_SEED, K=None):
    return combine('kahane', (kahane_check(space, points, q, K)
                              for points in _batches(space, n, batches, seed, b'kahane_suite')))


def moments_suite(space, n, q, batches, seed=DEFAULT_SEED):
    return combine('moments', (moment_comparison_check(space, points, q)
                               for points in _batches(space, n, batches, seed, b'moments_suite')))


def mean_zero_suite(space, n_points, n_vars, q, C_q, batches, seed=DEFAULT_SEED):
    e1 = basis_points(space, 1)
    verdicts = [mean_zero_sum_check(space, [0.5, 0.5], np.vstack([e1, -e1]), q, C_q, n_vars, seed=seed)]
    for block in range(batches):
        rng = stream(seed, b'mean_zero_suite', block)
        points = space.random_ball(rng, n_points)
        verdicts.append(mean_zero_sum_check(space, _simplex(rng, n_points), points, q, C_q, n_vars, seed=seed))
    return combine('mean-zero', verdicts)


def maurey_suite(space, n_points, p_tilde_small, q, C_q, b, batches, trials, seed=DEFAULT_SEED):
    e1 = basis_points(space, 1, 0.5 * b)
    verdicts = [maurey_check(space, [0.5, 0.5], np.vstack([e1, -e1]), p_tilde_small, q, C_q, b, trials, seed)]
    for block in range(batches):
        rng = stream(seed, b'maurey_suite', block)
        points = space.random_ball(rng, n_points, 0.5 * b)
        verdicts.append(maurey_check(space, _simplex(rng, n_points), points, p_tilde_small, q, C_q, b, trials, seed))
    return combine('maurey', verdicts)


def basis_pairs(space, scale=1.0):
    """(e_1, e_2) and (e_1, -e_1), the classic square and degenerate pairs"""
    eye = scale * np.eye(space.dim)
    pairs = [(eye[0], -eye[0])]
    if space.dim > 1:
        pairs.append((eye[0], eye[1]))
    return pairs


def lemma_suite(d, trials, seed=DEFAULT_SEED):
    return [eta_tilde_check(d, trials, seed), xi_gamma_check(d, trials, seed), xi_sigma_check(d, trials, seed=seed),
            lemma_q_tilde_check(d, trials, seed=seed), lemma_q_n_check(d, trials, seed=seed)]
