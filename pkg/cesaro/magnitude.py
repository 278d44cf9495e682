# License: LGPL-3.0+

"""
Leveled magnitudes: positive reals far outside the float64 range.

A value is stored as ``(level, branch, mantissa)``:

    level 0, unit           x = mantissa, with x in [1e-15, 1e15] or x = 0
    level 1, huge / tiny    x = 10^(+E) / 10^(-E), E = mantissa > 15
    level k, huge / tiny    x = 10^(+E) / 10^(-E), E itself huge at level k-1

At every level above 0 the mantissa lies in (15, 1e15]; the level is always
the smallest one able to hold the value. Rate computations produce numbers
like 10^-(10^9939.8) which only ever need multiplication, powers, logarithms
and comparison, so addition above level 0 is limited to what log-sum-exp and
dominant absorption can do without losing the top-level mantissa.

Text form, parsed back by `parse_magnitude`:

    3600.0                 level 0
    10^-4969.76            level 1
    10^+(10^9939.82)       level 2
    10^+(10^(10^20.5))     level 3
"""

import math
import re
from functools import total_ordering
from collections import namedtuple

import numpy as np

from .errors import MagnitudeError


LEVEL0_MIN = 1e-15
LEVEL0_MAX = 1e15
DECADES = 15.0      # log10 of LEVEL0_MAX, also the dominant-absorption gap

UNIT = 'unit'
HUGE = 'huge'
TINY = 'tiny'

_MAX_FLOAT_EXP10 = 308.0
# level 1 exponents up to here convert to normal floats
_NATIVE_EXP10 = 300.0
_LN10 = math.log(10.0)


def _check_float(x):
    if isinstance(x, bool) or not isinstance(x, (int, float, np.integer, np.floating)):
        raise TypeError("Not a real number: " + str(type(x).__name__))
    x = float(x)
    if not math.isfinite(x):
        raise MagnitudeError("Non-finite value %r" % (x,))
    return x


@total_ordering
class LeveledMagnitude(object):
    __slots__ = ('level', 'branch', 'mantissa')

    def __init__(self, level, branch, mantissa):
        mantissa = _check_float(mantissa)
        if not isinstance(level, int) or level < 0:
            raise MagnitudeError("Invalid level %r" % (level,))
        if level == 0:
            if branch != UNIT:
                raise MagnitudeError("Level 0 only has the unit branch")
            if mantissa != 0 and not (LEVEL0_MIN <= mantissa <= LEVEL0_MAX):
                raise MagnitudeError("Level 0 mantissa %r outside [1e-15, 1e15]" % (mantissa,))
        else:
            if branch not in (HUGE, TINY):
                raise MagnitudeError("Invalid branch %r at level %d" % (branch, level))
            if not (DECADES < mantissa <= LEVEL0_MAX):
                raise MagnitudeError("Level %d mantissa %r outside (15, 1e15]" % (level, mantissa))
        self.level = level
        self.branch = branch
        self.mantissa = mantissa

    @classmethod
    def zero(cls):
        return cls(0, UNIT, 0.0)

    @classmethod
    def one(cls):
        return cls(0, UNIT, 1.0)

    def is_zero(self):
        return self.level == 0 and self.mantissa == 0

    def exponent(self):
        """
        For level >= 1, the E with self = 10^(+-E), as a magnitude
        """
        if self.level == 0:
            raise MagnitudeError("Level 0 magnitudes have no stored exponent")
        if self.level == 1:
            return LeveledMagnitude(0, UNIT, self.mantissa)
        return LeveledMagnitude(self.level - 1, HUGE, self.mantissa)

    def _order_key(self):
        if self.branch == UNIT:
            return (0, self.mantissa)
        if self.branch == HUGE:
            return (self.level, self.mantissa)
        return (-self.level, -self.mantissa)

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return (self.level, self.branch, self.mantissa) == (other.level, other.branch, other.mantissa)

    def __ne__(self, other):
        return not self == other

    def __lt__(self, other):
        return self._order_key() < _coerce(other)._order_key()

    def __hash__(self):
        return hash((self.level, self.branch, self.mantissa))

    def __mul__(self, other):
        return lm_mul(self, _coerce(other))

    def __rmul__(self, other):
        return self * other

    def __truediv__(self, other):
        return lm_mul(self, lm_recip(_coerce(other)))

    def __rtruediv__(self, other):
        return lm_mul(_coerce(other), lm_recip(self))

    def __add__(self, other):
        return lm_add(self, _coerce(other))

    def __radd__(self, other):
        return self + other

    def __pow__(self, e):
        return lm_pow(self, e)

    def __float__(self):
        return self.to_float()

    def to_float(self):
        """Nearest float64; 0.0 or inf when the value lies outside its range"""
        if self.level == 0:
            return self.mantissa
        if self.level == 1 and self.mantissa <= _MAX_FLOAT_EXP10 + 16:
            sign = 1.0 if self.branch == HUGE else -1.0
            try:
                return 10.0 ** (sign * self.mantissa)
            except OverflowError:
                return math.inf
        return math.inf if self.branch == HUGE else 0.0

    def to_int(self):
        """Exact integer value, only for integral level-0 magnitudes"""
        if self.level != 0 or self.mantissa != math.floor(self.mantissa):
            raise MagnitudeError("%s is not a native integer" % (self,))
        return int(self.mantissa)

    def is_native_int(self):
        return self.level == 0 and self.mantissa == math.floor(self.mantissa)

    def format(self, precision=6):
        return format_magnitude(self, precision)

    def __str__(self):
        return format_magnitude(self)

    def __repr__(self):
        return 'LeveledMagnitude(%d, %r, %r)' % (self.level, self.branch, self.mantissa)


def _coerce(value):
    if isinstance(value, LeveledMagnitude):
        return value
    value = _check_float(value)
    if value == 0:
        return LeveledMagnitude.zero()
    return lm_from_float(value)


class SignedMagnitude(namedtuple('_SignedMagnitude', ('negative', 'magnitude'))):
    """
    A real number as a sign and a leveled magnitude

    Used for base-10 logarithms of leveled magnitudes, which may be negative
    and may themselves be far beyond float64.
    """
    @classmethod
    def from_float(cls, value):
        value = _check_float(value)
        if value == 0:
            return cls(False, LeveledMagnitude.zero())
        return cls(value < 0, lm_from_float(abs(value)))

    def to_float(self):
        value = self.magnitude.to_float()
        return -value if self.negative else value

    def is_zero(self):
        return self.magnitude.is_zero()

    def __neg__(self):
        if self.is_zero():
            return self
        return SignedMagnitude(not self.negative, self.magnitude)

    def __add__(self, other):
        if not isinstance(other, SignedMagnitude):
            other = SignedMagnitude.from_float(other)
        return lm_add_dominant(self, other)

    def __radd__(self, other):
        return self + other

    def __sub__(self, other):
        if not isinstance(other, SignedMagnitude):
            other = SignedMagnitude.from_float(other)
        return self + (-other)

    def scale(self, factor):
        """Multiply by a real factor (float or SignedMagnitude)"""
        if not isinstance(factor, SignedMagnitude):
            factor = SignedMagnitude.from_float(factor)
        if self.is_zero() or factor.is_zero():
            return SignedMagnitude(False, LeveledMagnitude.zero())
        return SignedMagnitude(self.negative != factor.negative,
                               lm_mul(self.magnitude, factor.magnitude))

    def __mul__(self, other):
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def _order_key(self):
        key = self.magnitude._order_key()
        if self.negative:
            return (-key[0], -key[1])
        return key

    def _cmp(self, other):
        if not isinstance(other, SignedMagnitude):
            other = SignedMagnitude.from_float(other)
        s1, s2 = self._signum(), other._signum()
        if s1 != s2:
            return -1 if s1 < s2 else 1
        if s1 == 0:
            return 0
        k1, k2 = self._order_key(), other._order_key()
        return (k1 > k2) - (k1 < k2)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def _signum(self):
        if self.is_zero():
            return 0
        return -1 if self.negative else 1

    def __str__(self):
        if self.is_zero():
            return '0.0'
        return ('-' if self.negative else '') + format_magnitude(self.magnitude)


def lm_from_float(x):
    """
    Wrap a positive finite float as a leveled magnitude

    Values in [1e-15, 1e15] stay at level 0, everything else becomes 10^(+-E)
    """
    x = _check_float(x)
    if x <= 0:
        raise MagnitudeError("Magnitudes must be strictly positive, got %r" % (x,))
    if LEVEL0_MIN <= x <= LEVEL0_MAX:
        return LeveledMagnitude(0, UNIT, x)
    e = math.log10(x)
    # log10 can land on the window edge for values just outside it
    if abs(e) <= DECADES:
        e = math.nextafter(DECADES, math.inf) if e > 0 else -math.nextafter(DECADES, math.inf)
    return LeveledMagnitude(1, HUGE if e > 0 else TINY, abs(e))


def _from_exp10(negative, exponent):
    """Build 10^(+-E) for a non-negative magnitude E, at the minimal level"""
    if exponent.is_zero():
        return LeveledMagnitude.one()
    if exponent.level == 0:
        e = exponent.mantissa
        if e <= DECADES:
            return LeveledMagnitude(0, UNIT, 10.0 ** (-e if negative else e))
        return LeveledMagnitude(1, TINY if negative else HUGE, e)
    if exponent.branch == TINY:
        # 10^(+-E) with E < 1e-15 is 1 to float precision
        return LeveledMagnitude.one()
    return LeveledMagnitude(exponent.level + 1, TINY if negative else HUGE, exponent.mantissa)


def lm_log10(a):
    """Base-10 logarithm as a SignedMagnitude"""
    if a.is_zero():
        raise MagnitudeError("log10 of zero")
    if a.level == 0:
        return SignedMagnitude.from_float(math.log10(a.mantissa))
    return SignedMagnitude(a.branch == TINY, a.exponent())


def lm_exp10(e):
    """10^e for a float or SignedMagnitude exponent"""
    if not isinstance(e, SignedMagnitude):
        e = SignedMagnitude.from_float(e)
    return _from_exp10(e.negative, e.magnitude)


def lm_mul(a, b):
    if a.is_zero() or b.is_zero():
        return LeveledMagnitude.zero()
    if a.level == 0 and b.level == 0:
        return lm_from_float(a.mantissa * b.mantissa)
    return lm_exp10(lm_add_dominant(lm_log10(a), lm_log10(b)))


def lm_recip(a):
    if a.is_zero():
        raise MagnitudeError("Reciprocal of zero")
    if a.level == 0:
        return lm_from_float(1.0 / a.mantissa)
    return LeveledMagnitude(a.level, TINY if a.branch == HUGE else HUGE, a.mantissa)


def lm_pow(a, e):
    e = _check_float(e)
    if e == 0:
        raise MagnitudeError("Exponent must be nonzero")
    if a.is_zero():
        raise MagnitudeError("Power of zero")
    if a.level == 0:
        log_result = e * math.log10(a.mantissa)
        if abs(log_result) < _MAX_FLOAT_EXP10:
            result = a.mantissa ** e
            if result > 0 and math.isfinite(result):
                return lm_from_float(result)
        return lm_exp10(log_result)
    return lm_exp10(lm_log10(a).scale(e))


def lm_compare(a, b):
    """-1, 0 or 1 as a is below, equal to, or above b"""
    a, b = _coerce(a), _coerce(b)
    if a == b:
        return 0
    return -1 if a < b else 1


def lm_add(a, b):
    """
    Sum of two non-negative magnitudes

    Exact at level 0, log-sum-exp through float64 when both logarithms fit a
    float, dominant absorption otherwise (the smaller operand is then below
    1e-15 of the larger in relative terms, or both share a level >= 2 exponent
    whose top mantissa the sum cannot move).
    """
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    if a.level == 0 and b.level == 0:
        return lm_from_float(a.mantissa + b.mantissa)
    la, lb = lm_log10(a), lm_log10(b)
    if la.magnitude.level == 0 and lb.magnitude.level == 0:
        hi, lo = max(la.to_float(), lb.to_float()), min(la.to_float(), lb.to_float())
        return lm_exp10(hi + float(np.log1p(10.0 ** (lo - hi))) / _LN10)
    return max(a, b)


def _is_native(a):
    return a.level == 0 or (a.level == 1 and a.mantissa <= _NATIVE_EXP10)


def lm_add_dominant(a, b):
    """
    Add two magnitudes, or two SignedMagnitudes

    Same-sign operands always succeed (see `lm_add`). Opposite signs are
    summed in float64 while both operands are normal floats, and through
    log10(|big|) + log10(1 - |small|/|big|) while both logarithms are. Beyond
    that the larger operand must exceed the smaller by more than 15 decades,
    in which case it is returned unchanged, otherwise the cancellation is
    reported as a MagnitudeError.
    """
    if isinstance(a, LeveledMagnitude) and isinstance(b, LeveledMagnitude):
        return lm_add(a, b)
    if not isinstance(a, SignedMagnitude):
        a = SignedMagnitude(False, _coerce(a))
    if not isinstance(b, SignedMagnitude):
        b = SignedMagnitude(False, _coerce(b))
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    if a.negative == b.negative:
        return SignedMagnitude(a.negative, lm_add(a.magnitude, b.magnitude))
    if _is_native(a.magnitude) and _is_native(b.magnitude):
        return SignedMagnitude.from_float(a.to_float() + b.to_float())
    if a.magnitude == b.magnitude:
        return SignedMagnitude(False, LeveledMagnitude.zero())
    big, small = (a, b) if a.magnitude > b.magnitude else (b, a)
    l_big, l_small = lm_log10(big.magnitude), lm_log10(small.magnitude)
    if l_big.magnitude.level == 0 and l_small.magnitude.level == 0:
        ratio = 10.0 ** (l_small.to_float() - l_big.to_float())
        if ratio < 1.0:
            return SignedMagnitude(big.negative,
                                   lm_exp10(l_big.to_float() + float(np.log1p(-ratio)) / _LN10))
    elif big.magnitude > lm_mul(small.magnitude, LeveledMagnitude(0, UNIT, LEVEL0_MAX)):
        return big
    raise MagnitudeError("Cancellation between %s and %s exceeds dominant absorption" % (a, b))


def lm_ceil(a):
    """Least integer >= a; magnitudes above 1e15 are integral already"""
    if a.level == 0:
        return LeveledMagnitude(0, UNIT, float(math.ceil(a.mantissa))) if a.mantissa < LEVEL0_MAX else a
    if a.branch == TINY:
        return LeveledMagnitude.one()
    return a


def _format_float(x, precision):
    return '%.*g' % (precision, x)


def format_magnitude(a, precision=6):
    if a.level == 0:
        return repr(a.mantissa)
    out = _format_float(a.mantissa, precision)
    for _ in range(a.level - 1):
        out = '(10^%s)' % (out,)
    return '10^%s%s' % ('+' if a.branch == HUGE else '-', out)


_FLOAT_RE = r'[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?|[0-9]+\.'


def _parse_huge(text):
    """Parse the exponent grammar: a float, or (10^<exponent>)"""
    text = text.strip()
    if text.startswith('(') and text.endswith(')'):
        inner = text[1:-1].strip()
        if not inner.startswith('10^'):
            raise MagnitudeError("Bad magnitude exponent: " + text)
        return _from_exp10(False, _parse_huge(inner[3:]))
    if not re.fullmatch(_FLOAT_RE, text):
        raise MagnitudeError("Bad magnitude exponent: " + text)
    value = float(text)
    return LeveledMagnitude.zero() if value == 0 else lm_from_float(value)


def parse_magnitude(text):
    """Inverse of `format_magnitude`"""
    text = text.strip()
    if not text.startswith('10^'):
        try:
            value = float(text)
        except ValueError:
            raise MagnitudeError("Bad magnitude: " + text)
        if value == 0:
            return LeveledMagnitude.zero()
        return lm_from_float(value)
    sign = text[3:4]
    if sign not in '+-' or not sign:
        raise MagnitudeError("Magnitude exponent needs an explicit sign: " + text)
    return _from_exp10(sign == '-', _parse_huge(text[4:]))
