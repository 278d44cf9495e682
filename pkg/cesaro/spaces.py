# License: LGPL-3.0+

"""
Finite-dimensional l^p spaces, nonexpansive self-maps of a ball, and the
Cesaro mean iterator.

Maps are built from descriptors:

    identity
    rotation:angle=1.5708               l^2 only, same angle in every coordinate plane
    rotation:angles=(0.3,1.2)           one angle per plane (0,1), (2,3), ...
    translate:target=(0.5,0),step=0.3   x -> x + step (target - x)
    project:r=0.5,center=(0,0)          metric projection onto a ball, l^2 only
    permute:order=(1,0),signs=(1,-1)    signed coordinate permutation
    fold:src=0,dst=1                    x_dst := |x_src|, l^inf only
    compose:[A;B;...]                   A(B(...(x)))
    combine:weights=(0.5,0.5),maps=[A;B]

Every map acts on the domain ball of radius b/2 around the origin, and on
stacked points (arrays whose last axis is the dimension).
"""

import math
import logging
from collections import namedtuple

import numpy as np

from .errors import DomainError
from .rng import stream, DEFAULT_SEED


log = logging.getLogger(__name__)

PREFIX_WINDOW = 1000
ENVELOPE_TOLERANCE = 1e-9
DOMAIN_SLACK = 1e-9
NOISE_HALVINGS = 30


class LpSpace(object):
    """R^dim with the l^p norm, 1 <= p <= inf"""
    def __init__(self, dim, p_norm=2.0):
        if not isinstance(dim, int) or dim < 1:
            raise DomainError("Dimension must be a positive integer")
        p_norm = float(p_norm)
        if not p_norm >= 1:
            raise DomainError("l^p needs p >= 1, got %r" % (p_norm,))
        self.dim = dim
        self.p_norm = p_norm

    def __repr__(self):
        return 'LpSpace(%d, %r)' % (self.dim, self.p_norm)

    def is_hilbert(self):
        return self.p_norm == 2

    def point(self, coords):
        x = np.asarray(coords, dtype=float)
        self.check(x)
        return x

    def check(self, x):
        if x.shape[-1:] != (self.dim,):
            raise DomainError("Expected points of dimension %d, got shape %s" % (self.dim, x.shape))
        if not np.all(np.isfinite(x)):
            raise DomainError("Point has non-finite coordinates")

    def norm(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.dim,):
            raise DomainError("Expected points of dimension %d, got shape %s" % (self.dim, x.shape))
        return np.linalg.norm(x, ord=self.p_norm, axis=-1)

    def dist(self, x, y):
        return self.norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))

    def random_direction(self, rng, count=None):
        """Points of norm 1, normalized generalized-Gaussian (uniform on the sphere for p=2)"""
        shape = (self.dim,) if count is None else (count, self.dim)
        if math.isinf(self.p_norm):
            g = rng.uniform(-1.0, 1.0, size=shape)
        else:
            g = self._generalized_gaussian(rng, shape)
        norms = self.norm(g)
        return g / np.expand_dims(np.where(norms > 0, norms, 1.0), -1)

    def _generalized_gaussian(self, rng, shape):
        # density proportional to exp(-|t|^p)
        p = self.p_norm
        magnitude = rng.gamma(1.0 / p, 1.0, size=shape) ** (1.0 / p)
        return magnitude * rng.choice((-1.0, 1.0), size=shape)

    def random_ball(self, rng, count, radius=1.0, center=None):
        """
        Uniform samples from the l^p ball: with g generalized-Gaussian and w
        standard exponential, g / (||g||_p^p + w)^(1/p) is uniform in the unit ball
        """
        shape = (count, self.dim)
        if math.isinf(self.p_norm):
            x = rng.uniform(-1.0, 1.0, size=shape)
        else:
            p = self.p_norm
            g = self._generalized_gaussian(rng, shape)
            w = rng.exponential(1.0, size=count)
            x = g / ((np.sum(np.abs(g) ** p, axis=-1) + w) ** (1.0 / p))[:, None]
        x = radius * x
        if center is not None:
            x = x + np.asarray(center, dtype=float)
        return x


class NonexpansiveMap(object):
    """Base class for catalogue maps"""
    kind = None

    def __call__(self, x):
        raise NotImplementedError()

    def fixed_point(self, space):
        """A known fixed point in the domain, or None"""
        return None

    def check_domain(self, space, radius):
        """Raise DomainError unless the map is a nonexpansive self-map of the ball"""
        pass

    def spec(self):
        raise NotImplementedError()

    def __str__(self):
        return self.spec()


def _format_vector(v):
    return '(' + ','.join(repr(float(_)) for _ in v) + ')'


class IdentityMap(NonexpansiveMap):
    kind = 'identity'

    def __call__(self, x):
        return np.array(x, dtype=float)

    def fixed_point(self, space):
        return np.zeros(space.dim)

    def spec(self):
        return 'identity'


class RotationMap(NonexpansiveMap):
    """Rotates coordinate planes (0,1), (2,3), ...; an odd last coordinate is kept"""
    kind = 'rotation'

    def __init__(self, angles):
        self.angles = [float(_) for _ in angles]
        self._matrix = None

    def _build(self, dim):
        planes = dim // 2
        angles = self.angles
        if len(angles) == 1:
            angles = angles * planes
        if len(angles) != planes:
            raise DomainError("rotation of dimension %d needs %d angles, got %d" % (dim, planes, len(self.angles)))
        matrix = np.eye(dim)
        for i, theta in enumerate(angles):
            c, s = math.cos(theta), math.sin(theta)
            j = 2 * i
            matrix[j:j + 2, j:j + 2] = [[c, -s], [s, c]]
        return matrix

    def check_domain(self, space, radius):
        if not space.is_hilbert():
            raise DomainError("rotation is an isometry of l^2 only, not l^%g" % (space.p_norm,))
        if space.dim < 2:
            raise DomainError("rotation needs dimension >= 2")
        self._matrix = self._build(space.dim)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self._matrix is None or self._matrix.shape[0] != x.shape[-1]:
            self._matrix = self._build(x.shape[-1])
        return x @ self._matrix.T

    def fixed_point(self, space):
        return np.zeros(space.dim)

    def spec(self):
        if len(self.angles) == 1:
            return 'rotation:angle=%r' % (self.angles[0],)
        return 'rotation:angles=' + _format_vector(self.angles)


class TranslateMap(NonexpansiveMap):
    """x -> x + step (target - x), a contraction toward target when step > 0"""
    kind = 'translate'

    def __init__(self, target, step):
        self.target = np.asarray(target, dtype=float)
        self.step = float(step)
        if not 0 <= self.step <= 1:
            raise DomainError("translate step must lie in [0,1]")

    def check_domain(self, space, radius):
        space.check(self.target)
        if space.norm(self.target) > radius * (1 + DOMAIN_SLACK):
            raise DomainError("translate target %s lies outside the domain ball" % (_format_vector(self.target),))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return x + self.step * (self.target - x)

    def fixed_point(self, space):
        if self.step == 0:
            return np.zeros(space.dim)
        return self.target.copy()

    def spec(self):
        return 'translate:target=%s,step=%r' % (_format_vector(self.target), self.step)


class ProjectMap(NonexpansiveMap):
    """c + r (x - c) / max(r, ||x - c||)"""
    kind = 'project'

    def __init__(self, r, center=None):
        self.r = float(r)
        if not self.r > 0:
            raise DomainError("projection radius must be positive")
        self.center = None if center is None else np.asarray(center, dtype=float)

    def check_domain(self, space, radius):
        if not space.is_hilbert():
            # radial retraction is not a metric projection outside l^2
            raise DomainError("project is nonexpansive only in l^2, not l^%g" % (space.p_norm,))
        if self.center is None:
            self.center = np.zeros(space.dim)
        space.check(self.center)
        if space.norm(self.center) > radius * (1 + DOMAIN_SLACK):
            raise DomainError("projection center lies outside the domain ball")

    def _center(self, dim):
        return np.zeros(dim) if self.center is None else self.center

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        c = self._center(x.shape[-1])
        d = x - c
        n = np.linalg.norm(d, axis=-1, keepdims=True)
        return c + self.r * d / np.maximum(self.r, n)

    def fixed_point(self, space):
        return self._center(space.dim).copy()

    def spec(self):
        if self.center is None:
            return 'project:r=%r' % (self.r,)
        return 'project:r=%r,center=%s' % (self.r, _format_vector(self.center))


class PermuteMap(NonexpansiveMap):
    """x -> (signs[i] * x[order[i]])_i, an isometry of every l^p"""
    kind = 'permute'

    def __init__(self, order, signs=None):
        self.order = [int(_) for _ in order]
        if sorted(self.order) != list(range(len(self.order))):
            raise DomainError("permute order must be a permutation of 0..%d" % (len(self.order) - 1,))
        self.signs = np.ones(len(self.order)) if signs is None else np.asarray(signs, dtype=float)
        if self.signs.shape != (len(self.order),) or not np.all(np.abs(self.signs) == 1):
            raise DomainError("permute signs must be +-1, one per coordinate")

    def check_domain(self, space, radius):
        if len(self.order) != space.dim:
            raise DomainError("permute of length %d on a space of dimension %d" % (len(self.order), space.dim))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return x[..., self.order] * self.signs

    def fixed_point(self, space):
        return np.zeros(space.dim)

    def spec(self):
        return 'permute:order=(%s),signs=%s' % (','.join(str(_) for _ in self.order), _format_vector(self.signs))


class FoldMap(NonexpansiveMap):
    """x_dst := |x_src|; 1-Lipschitz for the max-norm, not for any l^p with p < inf"""
    kind = 'fold'

    def __init__(self, src, dst):
        self.src = int(src)
        self.dst = int(dst)

    def check_domain(self, space, radius):
        if not math.isinf(space.p_norm):
            raise DomainError("fold is nonexpansive only in l^inf, not l^%g" % (space.p_norm,))
        for index in (self.src, self.dst):
            if not 0 <= index < space.dim:
                raise DomainError("fold coordinate %d out of range" % (index,))

    def __call__(self, x):
        y = np.array(x, dtype=float)
        y[..., self.dst] = np.abs(np.asarray(x, dtype=float)[..., self.src])
        return y

    def fixed_point(self, space):
        return np.zeros(space.dim)

    def spec(self):
        return 'fold:src=%d,dst=%d' % (self.src, self.dst)


def _common_fixed_point(maps, space):
    points = [_.fixed_point(space) for _ in maps]
    if any(_ is None for _ in points):
        return None
    first = points[0]
    for other in points[1:]:
        if not np.allclose(first, other, rtol=0, atol=1e-12):
            return None
    return first


class ComposeMap(NonexpansiveMap):
    kind = 'compose'

    def __init__(self, maps):
        if not maps:
            raise DomainError("compose needs at least one map")
        self.maps = list(maps)

    def check_domain(self, space, radius):
        for inner in self.maps:
            inner.check_domain(space, radius)

    def __call__(self, x):
        for inner in reversed(self.maps):
            x = inner(x)
        return x

    def fixed_point(self, space):
        return _common_fixed_point(self.maps, space)

    def spec(self):
        return 'compose:[' + ';'.join(_.spec() for _ in self.maps) + ']'


class CombineMap(NonexpansiveMap):
    """Convex combination sum_i w_i T_i"""
    kind = 'combine'

    def __init__(self, weights, maps):
        self.weights = np.asarray(weights, dtype=float)
        self.maps = list(maps)
        if len(self.maps) == 0 or self.weights.shape != (len(self.maps),):
            raise DomainError("combine needs one weight per map")
        if np.any(self.weights < 0) or abs(float(np.sum(self.weights)) - 1.0) > 1e-12:
            raise DomainError("combine weights must be non-negative and sum to 1")

    def check_domain(self, space, radius):
        for inner in self.maps:
            inner.check_domain(space, radius)

    def __call__(self, x):
        out = None
        for w, inner in zip(self.weights, self.maps):
            y = w * inner(x)
            out = y if out is None else out + y
        return out

    def fixed_point(self, space):
        return _common_fixed_point(self.maps, space)

    def spec(self):
        return 'combine:weights=%s,maps=[%s]' % (_format_vector(self.weights), ';'.join(_.spec() for _ in self.maps))


def _split_top(text, sep):
    """Split on `sep` outside parentheses and brackets"""
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in '([':
            depth += 1
        elif ch in ')]':
            depth -= 1
            if depth < 0:
                raise DomainError("Unbalanced brackets in map descriptor: " + text)
        elif ch == sep and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    if depth != 0:
        raise DomainError("Unbalanced brackets in map descriptor: " + text)
    parts.append(text[start:])
    return [_.strip() for _ in parts]


def _parse_vector(text):
    text = text.strip()
    if not (text.startswith('(') and text.endswith(')')):
        raise DomainError("Expected a vector like (1,0), got %r" % (text,))
    try:
        return [float(_) for _ in text[1:-1].split(',') if _.strip()]
    except ValueError:
        raise DomainError("Not a number in vector %r" % (text,))


def _parse_float(text):
    try:
        return float(text)
    except ValueError:
        raise DomainError("Not a number: %r" % (text,))


def _parse_list(text):
    text = text.strip()
    if not (text.startswith('[') and text.endswith(']')):
        raise DomainError("Expected a map list like [A;B], got %r" % (text,))
    return [_build_map(_) for _ in _split_top(text[1:-1], ';') if _]


def _params(rest):
    params = {}
    for item in _split_top(rest, ','):
        if not item:
            continue
        key, eq, value = item.partition('=')
        if not eq:
            raise DomainError("Expected key=value in map descriptor, got %r" % (item,))
        params[key.strip()] = value.strip()
    return params


def _require(params, kind, required, optional=()):
    unknown = set(params) - set(required) - set(optional)
    missing = set(required) - set(params)
    if unknown or missing:
        raise DomainError("%s takes %s (optional %s); got %s" % (kind, ', '.join(required) or 'nothing',
                                                              ', '.join(optional) or 'none', ', '.join(sorted(params)) or 'nothing'))


def _build_map(text):
    text = text.strip()
    kind, _, rest = text.partition(':')
    kind = kind.strip()
    if kind == 'compose':
        return ComposeMap(_parse_list(rest))
    params = _params(rest)
    if kind == 'identity':
        _require(params, kind, ())
        return IdentityMap()
    if kind == 'rotation':
        if 'angle' in params:
            _require(params, kind, ('angle',))
            return RotationMap([_parse_float(params['angle'])])
        _require(params, kind, ('angles',))
        return RotationMap(_parse_vector(params['angles']))
    if kind == 'translate':
        _require(params, kind, ('target', 'step'))
        return TranslateMap(_parse_vector(params['target']), _parse_float(params['step']))
    if kind == 'project':
        _require(params, kind, ('r',), ('center',))
        center = _parse_vector(params['center']) if 'center' in params else None
        return ProjectMap(_parse_float(params['r']), center)
    if kind == 'permute':
        _require(params, kind, ('order',), ('signs',))
        order = _parse_vector(params['order'])
        if any(_ != int(_) for _ in order):
            raise DomainError("permute order must be integers")
        signs = _parse_vector(params['signs']) if 'signs' in params else None
        return PermuteMap(order, signs)
    if kind == 'fold':
        _require(params, kind, ('src', 'dst'))
        return FoldMap(int(_parse_float(params['src'])), int(_parse_float(params['dst'])))
    if kind == 'combine':
        _require(params, kind, ('weights', 'maps'))
        return CombineMap(_parse_vector(params['weights']), _parse_list(params['maps']))
    raise DomainError("Unknown map kind %r" % (kind,))


def parse_map(text, space, radius):
    """Build a map from its descriptor and check it against the domain ball"""
    if not radius > 0:
        raise DomainError("Domain radius must be positive")
    T = _build_map(text)
    T.check_domain(space, radius)
    return T


class CesaroTrace(namedtuple('_CesaroTrace', ('n', 'residual', 'orbit', 'means', 'mean', 'noise_shrunk'))):
    """
    Residuals ||m_n - T m_n|| at the recorded n, orbit points and means for
    the first PREFIX_WINDOW steps, and the final mean
    """
    def __new__(cls, n, residual, orbit=None, means=None, mean=None, noise_shrunk=0):
        return super(CesaroTrace, cls).__new__(cls, np.asarray(n), np.asarray(residual, dtype=float),
                                               orbit, means, mean, noise_shrunk)


def _perturb(space, T, o, rng, alpha, radius):
    """T(o) plus a random vector of norm alpha, halved until the point stays in the ball"""
    target = T(o)
    direction = space.random_direction(rng)
    scale = alpha
    for _ in range(NOISE_HALVINGS):
        candidate = target + scale * direction
        if space.norm(candidate) <= radius:
            return candidate, scale != alpha
        scale *= 0.5
    return target, True


def cesaro_run(space, T, x, n_max, alpha_noise=0.0, seed=DEFAULT_SEED, radius=math.inf,
               every=1, window=PREFIX_WINDOW):
    """
    Iterate o_0 = x, o_{n} = T o_{n-1} (+ noise of norm <= alpha_noise) and
    the running mean m_n = (o_0 + ... + o_{n-1}) / n, updated as
    m_n = m_{n-1} + (o_{n-1} - m_{n-1}) / n

    Residuals are recorded for n <= window and then every `every` steps.
    """
    if not isinstance(n_max, int) or n_max < 1:
        raise ValueError("n_max must be a positive integer")
    if alpha_noise < 0:
        raise ValueError("alpha_noise must be non-negative")
    if every < 1:
        raise ValueError("every must be positive")
    o = space.point(x)
    limit = radius * (1 + DOMAIN_SLACK)
    if space.norm(o) > limit:
        raise DomainError("Starting point of norm %r lies outside the domain ball of radius %r" % (float(space.norm(o)), radius))
    if alpha_noise > 0 and math.isinf(radius):
        raise DomainError("Perturbed runs need a bounded domain")
    rng = stream(seed, b'cesaro_run') if alpha_noise > 0 else None

    m = np.zeros(space.dim)
    ns, residuals, orbit, means = [], [], [], []
    shrunk = 0
    for n in range(1, n_max + 1):
        m = m + (o - m) / n
        if n <= window:
            orbit.append(o.copy())
            means.append(m.copy())
        if n <= window or n % every == 0 or n == n_max:
            ns.append(n)
            residuals.append(float(space.dist(m, T(m))))
        if n == n_max:
            break
        if rng is not None:
            o, was_shrunk = _perturb(space, T, o, rng, alpha_noise, radius)
            shrunk += was_shrunk
        else:
            o = T(o)
        norm = float(space.norm(o))
        if norm > limit or not math.isfinite(norm):
            raise DomainError("Orbit left the domain at step %d: ||o|| = %r > %r under %s" % (n, norm, radius, T))
    if shrunk:
        log.warning("cesaro_run: noise shrunk to stay in the domain at %d of %d steps", shrunk, n_max)
    return CesaroTrace(ns, residuals, np.array(orbit), np.array(means), m, shrunk)


def sqrt_envelope(diam):
    """n -> diam / sqrt(n), the Hilbert-space bound on the Cesaro residual"""
    if not diam > 0:
        raise ValueError("diam must be positive")

    def envelope(n):
        return diam / np.sqrt(n)
    return envelope


EnvelopeReport = namedtuple('EnvelopeReport', ('passed', 'violations'))


def residual_envelope_check(trace, envelope, tolerance=ENVELOPE_TOLERANCE):
    """Every recorded n whose residual exceeds envelope(n) + tolerance"""
    n = np.asarray(trace.n)
    residual = np.asarray(trace.residual, dtype=float)
    bound = np.broadcast_to(np.asarray(envelope(n), dtype=float), n.shape)
    bad = np.nonzero(residual > bound + tolerance)[0]
    violations = [(int(n[i]), float(residual[i]), float(bound[i])) for i in bad]
    return EnvelopeReport(not violations, violations)


def write_trace_csv(trace, handle, envelope=None):
    if envelope is None:
        handle.write('n,residual\n')
        for n, r in zip(trace.n, trace.residual):
            handle.write('%d,%r\n' % (n, float(r)))
        return
    handle.write('n,residual,envelope\n')
    bound = np.broadcast_to(np.asarray(envelope(np.asarray(trace.n)), dtype=float), np.shape(trace.n))
    for n, r, e in zip(trace.n, trace.residual, bound):
        handle.write('%d,%r,%r\n' % (n, float(r), float(e)))
