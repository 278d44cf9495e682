# License: LGPL-3.0+

"""
Moduli of uniform convexity and the functions derived from them.

A modulus is a function eta:(0,2] -> (0,1] such that, for ||x||,||y|| <= 1,

    ||x - y|| >= eps   implies   ||(x + y)/2|| <= 1 - eta(eps)

From eta the rate pipeline derives

    eta1(eps)      = sup { eta(e) : 0 < e <= min(2, eps) },  eta1(0) = 0
    eta_tilde(eps) = 1/2 * integral_0^eps eta1(t) dt         (convex)
    gamma(eps)     = b/2 * eta_tilde(4 eps / b)
    q_tilde(eps)   = gamma^-1(3 eps) + eps
    q_n(eps)       = gamma^-1(2 eps + b/n) + eps
    sigma          = q_tilde^-1

Every modulus also offers `log_eta`, taking u = ln(eps) to ln(eta(e^u)). It
accepts a SignedMagnitude for u so that the rate pipeline can evaluate eta at
arguments far below the float64 range.
"""

import math
import logging
import warnings
from collections import namedtuple

import numpy as np
from scipy import integrate, optimize

from .errors import ModulusError, QuadratureError
from .magnitude import SignedMagnitude


log = logging.getLogger(__name__)

VALIDATION_POINTS = 1000
QUAD_EPSABS = 1e-10
QUAD_EPSREL = 1e-12

_LN2 = math.log(2.0)


PowerBranch = namedtuple('PowerBranch', ('c', 's', 'eps_max', 'exact', 'closed'))
"""
eta(eps) == c * eps^s for 0 < eps <= eps_max when `exact`, otherwise the
power law is only a lower bound of eta there (still a valid modulus). When
not `closed` the branch stops just below eps_max.
"""


def _is_huge(u):
    return isinstance(u, SignedMagnitude) and u.magnitude.level > 0


class ModulusSpec(object):
    """
    Base class, concrete moduli implement `eta`, `log_eta` and `power_branch`
    """
    def eta(self, eps):
        raise NotImplementedError()

    def log_eta(self, u):
        raise NotImplementedError()

    def power_branch(self):
        raise NotImplementedError()

    def spec(self):
        """The CLI grammar string that reconstructs this modulus"""
        raise NotImplementedError()

    def __str__(self):
        return self.spec()

    def validate(self, points=VALIDATION_POINTS):
        """
        Check eta and log_eta map (0,2] into (0,1] on a uniform grid
        """
        grid = np.linspace(2.0 / points, 2.0, points)
        for eps in grid:
            value = self.log_eta(math.log(eps))
            if not (value <= 1e-15) or value == -math.inf or math.isnan(value):
                raise ModulusError("%s: eta(%g) = exp(%r) is not in (0,1]" % (self.spec(), eps, value))
            value = self.eta(float(eps))
            if not (0.0 < value <= 1.0):
                raise ModulusError("%s: eta(%g) = %r is not in (0,1]" % (self.spec(), eps, value))
        return self

    def eta1(self, eps):
        """Monotone envelope, our moduli are nondecreasing so eta1 = eta(min(2, eps))"""
        if eps < 0:
            raise ValueError("eps must be non-negative")
        if eps == 0:
            return 0.0
        return self.eta(min(2.0, eps))

    def _tail(self, eps):
        """eta_tilde beyond 2, where eta1 is constant"""
        return 0.5 * (eps - 2.0) * self.eta1(2.0)

    def eta_tilde(self, eps):
        """
        Adaptive quadrature of 1/2 * integral_0^eps eta1(t) dt
        """
        if eps < 0:
            raise ValueError("eps must be non-negative")
        if eps == 0:
            return 0.0
        upper = min(eps, 2.0)
        points = [_ for _ in self._breakpoints() if 0 < _ < upper]
        with warnings.catch_warnings():
            warnings.simplefilter('error', integrate.IntegrationWarning)
            try:
                value, _ = integrate.quad(self.eta1, 0.0, upper,
                                          points=points or None,
                                          limit=max(50, 4 * len(points)),
                                          epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL)
            except integrate.IntegrationWarning as ex:
                raise QuadratureError("%s: eta_tilde(%g) did not converge: %s" % (self.spec(), eps, ex))
        result = 0.5 * value
        if eps > 2.0:
            result += self._tail(eps)
        return result

    def _breakpoints(self):
        return []


class PowerModulus(ModulusSpec):
    """eta(eps) = min(1, c * eps^s)"""
    def __init__(self, c, s):
        if not (c > 0 and math.isfinite(c)):
            raise ModulusError("Power modulus needs c > 0, got %r" % (c,))
        if not (s > 0 and math.isfinite(s)):
            raise ModulusError("Power modulus needs s > 0, got %r" % (s,))
        self.c = float(c)
        self.s = float(s)
        # eta saturates at 1 from here on
        self._knee = c ** (-1.0 / s)
        self.validate()

    def eta(self, eps):
        if eps <= 0:
            raise ValueError("eta is defined on (0,2]")
        return min(1.0, self.c * min(eps, 2.0) ** self.s)

    def log_eta(self, u):
        if _is_huge(u):
            return u.scale(self.s) + math.log(self.c)
        u = min(float(u), _LN2)
        return min(0.0, math.log(self.c) + self.s * u)

    def power_branch(self):
        return PowerBranch(self.c, self.s, min(2.0, self._knee), True, True)

    def eta_tilde(self, eps):
        if eps < 0:
            raise ValueError("eps must be non-negative")
        c, s = self.c, self.s
        knee = min(self._knee, 2.0)
        e = min(eps, 2.0)
        if e <= knee:
            result = 0.5 * c * e ** (s + 1) / (s + 1)
        else:
            result = 0.5 * (c * knee ** (s + 1) / (s + 1) + (e - knee))
        if eps > 2.0:
            result += self._tail(eps)
        return result

    def spec(self):
        return 'power:c=%r,s=%r' % (self.c, self.s)


class HilbertModulus(ModulusSpec):
    """eta(eps) = 1 - sqrt(1 - eps^2/4), the exact modulus of inner-product spaces"""
    SERIES_CUTOFF = 0.5
    SERIES_TERMS = 20

    def __init__(self):
        # 1 - sqrt(1-x) = sum_k binom(2k,k) / ((2k-1) 4^k) x^k
        self._series = [math.comb(2 * k, k) / ((2 * k - 1) * 4.0 ** k) for k in range(1, self.SERIES_TERMS + 1)]
        self.validate()

    def eta(self, eps):
        if eps <= 0:
            raise ValueError("eta is defined on (0,2]")
        x = min(eps, 2.0) ** 2 / 4.0
        return x / (1.0 + math.sqrt(1.0 - x))

    def log_eta(self, u):
        if _is_huge(u):
            # eta(eps) = eps^2/8 * (1 + O(eps^2)), and eps is below 1e-(10^15) here
            return u.scale(2.0) - math.log(8.0)
        u = min(float(u), _LN2)
        x = math.exp(2.0 * u) / 4.0
        return 2.0 * u - math.log(4.0) - math.log1p(math.sqrt(1.0 - x))

    def power_branch(self):
        # 1 - sqrt(1-x) >= x/2 gives eta(eps) >= eps^2/8 on all of (0,2]
        return PowerBranch(0.125, 2.0, 2.0, False, True)

    def eta_tilde(self, eps):
        if eps < 0:
            raise ValueError("eps must be non-negative")
        e = min(eps, 2.0)
        if e <= self.SERIES_CUTOFF:
            result = 0.0
            for k, a_k in enumerate(self._series, 1):
                result += a_k * e ** (2 * k + 1) / ((2 * k + 1) * 4.0 ** k)
            result *= 0.5
        else:
            h = e / 2.0
            result = 0.5 * (e - h * math.sqrt(max(0.0, 1.0 - h * h)) - math.asin(h))
        if eps > 2.0:
            result += self._tail(eps)
        return result

    def spec(self):
        return 'hilbert'


BUILTIN_TABLES = {
    # eta == 1/2, a synthetic modulus whose rate pipeline has a geometric closed form
    'const_half': [(2.0, 0.5)],
}


class TableModulus(ModulusSpec):
    """
    Left-constant step function through (eps_i, eta_i)

    eta(eps) = eta_i for the largest eps_i <= eps; the first row also covers
    everything below eps_0, so it must be a valid lower bound down to 0.
    """
    def __init__(self, rows, name=None):
        rows = sorted((float(e), float(v)) for e, v in rows)
        if not rows:
            raise ModulusError("Empty modulus table")
        eps = np.array([_[0] for _ in rows])
        values = np.array([_[1] for _ in rows])
        if np.any(eps <= 0) or np.any(eps > 2):
            raise ModulusError("Table arguments must lie in (0,2]")
        if np.any(np.diff(eps) <= 0):
            raise ModulusError("Duplicate table arguments")
        if np.any(np.diff(values) < 0):
            raise ModulusError("Table values must be nondecreasing in eps")
        if np.any(values <= 0) or np.any(values > 1):
            raise ModulusError("Table values must lie in (0,1]")
        self.eps = eps
        self.values = values
        self.name = name
        self.validate()

    @classmethod
    def from_file(cls, path):
        rows = []
        with open(path, 'r', encoding='utf-8') as handle:
            for lineno, line in enumerate(handle, 1):
                line = line.split('#', 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 2:
                    raise ModulusError("%s:%d: expected two columns" % (path, lineno))
                try:
                    rows.append((float(parts[0]), float(parts[1])))
                except ValueError:
                    raise ModulusError("%s:%d: not a number" % (path, lineno))
        return cls(rows, name=path)

    def _index(self, eps):
        return max(0, int(np.searchsorted(self.eps, eps, side='right')) - 1)

    def eta(self, eps):
        if eps <= 0:
            raise ValueError("eta is defined on (0,2]")
        return float(self.values[self._index(min(eps, 2.0))])

    def log_eta(self, u):
        if _is_huge(u):
            return SignedMagnitude.from_float(math.log(self.values[0]))
        # exp(u) may underflow to 0, which the first row still covers
        return math.log(float(self.values[self._index(math.exp(min(float(u), _LN2)))]))

    def power_branch(self):
        if len(self.eps) == 1:
            return PowerBranch(float(self.values[0]), 0.0, 2.0, True, True)
        # the second step starts at its own breakpoint
        return PowerBranch(float(self.values[0]), 0.0, float(self.eps[1]), True, False)

    def _breakpoints(self):
        return list(self.eps)

    def spec(self):
        return 'table:%s' % (self.name or 'inline',)


def lp_preset(p):
    """
    Catalogue modulus for L^p, 1 < p < inf

    (p-1)/8 * eps^2 for 1 < p < 2, (1/p) * (eps/2)^p for p >= 2 (Hilbert case p = 2
    agrees with the eps^2/8 lower bound of the exact modulus)
    """
    if not p > 1 or not math.isfinite(p):
        raise ModulusError("L^p is uniformly convex only for 1 < p < inf")
    if p < 2:
        return PowerModulus((p - 1.0) / 8.0, 2.0)
    return PowerModulus((1.0 / p) * 0.5 ** p, p)


def _parse_params(text):
    params = {}
    for item in text.split(','):
        if not item.strip():
            continue
        if '=' not in item:
            raise ModulusError("Expected key=value in modulus parameters: %r" % (item,))
        key, value = item.split('=', 1)
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise ModulusError("Not a number in modulus parameters: %r" % (item,))
    return params


def parse_modulus(text):
    """
    Grammar: hilbert | power:c=<float>,s=<float> | lp:p=<float> | table:<name or path>
    """
    text = text.strip()
    kind, _, rest = text.partition(':')
    if kind == 'hilbert' and not rest:
        return HilbertModulus()
    if kind == 'power':
        params = _parse_params(rest)
        if set(params) != {'c', 's'}:
            raise ModulusError("power modulus needs exactly c and s: " + text)
        return PowerModulus(params['c'], params['s'])
    if kind == 'lp':
        params = _parse_params(rest)
        if set(params) != {'p'}:
            raise ModulusError("lp preset needs exactly p: " + text)
        return lp_preset(params['p'])
    if kind == 'table' and rest:
        if rest in BUILTIN_TABLES:
            return TableModulus(BUILTIN_TABLES[rest], name=rest)
        try:
            return TableModulus.from_file(rest)
        except OSError as ex:
            raise ModulusError("Cannot read modulus table %r: %s" % (rest, ex))
    raise ModulusError("Unknown modulus specification: " + text)


class DerivedModuli(object):
    """
    eta1, eta_tilde, gamma and their inverses for a modulus and norm bound b,
    where the domain C lies in the ball of radius b/2
    """
    INVERSE_XTOL = 1e-14    # in ln(eps), i.e. relative

    def __init__(self, modulus, b):
        if not (b > 0 and math.isfinite(b)):
            raise ValueError("Norm bound b must be positive")
        self.modulus = modulus
        self.b = float(b)

    def eta1(self, eps):
        return self.modulus.eta1(eps)

    def eta_tilde(self, eps):
        return self.modulus.eta_tilde(eps)

    def gamma(self, eps):
        if eps < 0:
            raise ValueError("gamma is defined on [0, inf)")
        return 0.5 * self.b * self.modulus.eta_tilde(4.0 * eps / self.b)

    def gamma_inv(self, y):
        """
        Bisection in ln(eps); gamma(eps) <= eps gives the lower bracket eps = y
        """
        if y < 0:
            raise ValueError("gamma^-1 is defined on [0, inf)")
        if y == 0:
            return 0.0
        lo = y
        if self.gamma(lo) >= y:
            return lo
        hi, step = 2.0 * lo, 2.0
        while self.gamma(hi) < y:
            lo, hi = hi, hi * step
            step = min(step * step, 1e16)
        log_y = math.log(y)

        def f(u):
            with np.errstate(divide='ignore'):
                return float(np.log(self.gamma(math.exp(u)))) - log_y

        u = optimize.bisect(f, math.log(lo), math.log(hi), xtol=self.INVERSE_XTOL, maxiter=400)
        return math.exp(u)

    def q_tilde(self, eps):
        if eps < 0:
            raise ValueError("q_tilde is defined on [0, inf)")
        return self.gamma_inv(3.0 * eps) + eps

    def q_n(self, eps, n):
        if eps < 0:
            raise ValueError("q_n is defined on [0, inf)")
        if not isinstance(n, int) or n < 1:
            raise ValueError("q_n needs a positive integer n")
        return self.gamma_inv(2.0 * eps + self.b / n) + eps

    def sigma(self, t):
        """
        Inverse of q_tilde

        With u = gamma^-1(3 eps) the equation q_tilde(eps) = t reads
        u + gamma(u)/3 = t, which has a root in [3t/4, t] since gamma(u) <= u;
        then sigma(t) = gamma(u)/3.
        """
        if t < 0:
            raise ValueError("sigma is defined on [0, inf)")
        if t == 0:
            return 0.0

        def h(u):
            return u + self.gamma(u) / 3.0 - t

        lo, hi = 0.75 * t, t
        if h(lo) >= 0:
            u = lo
        else:
            # xtol must stay positive for subnormal t
            u = optimize.bisect(h, lo, hi, xtol=max(1e-13 * t, math.ulp(0.0)), maxiter=200)
        return self.gamma(u) / 3.0


def eval_eta1(m, eps):
    return m.eta1(eps)


def eval_eta_tilde(d, eps):
    return d.eta_tilde(eps)


def eval_gamma(d, eps):
    return d.gamma(eps)


def eval_gamma_inv(d, y):
    return d.gamma_inv(y)


def eval_q_tilde(d, eps):
    return d.q_tilde(eps)


def eval_q_n(d, eps, n):
    return d.q_n(eps, n)


def eval_sigma(d, t):
    return d.sigma(t)
