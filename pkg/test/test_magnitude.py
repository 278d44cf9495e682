# License: LGPL-3.0+

import math
import unittest

import numpy as np

from cesaro.errors import MagnitudeError
from cesaro.magnitude import (LeveledMagnitude, SignedMagnitude, UNIT, HUGE, TINY,
                              lm_from_float, lm_mul, lm_pow, lm_log10, lm_exp10, lm_recip,
                              lm_compare, lm_add_dominant, lm_ceil, format_magnitude,
                              parse_magnitude)
from cesaro.rng import stream


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


class TestRepresentation(unittest.TestCase):
    def test_from_float(self):
        self.assertEqual(lm_from_float(1.0), LeveledMagnitude(0, UNIT, 1.0))
        big = lm_from_float(1e300)
        self.assertEqual((big.level, big.branch), (1, HUGE))
        self.assertAlmostEqual(big.mantissa, 300.0, places=9)
        small = lm_from_float(1e-300)
        self.assertEqual((small.level, small.branch), (1, TINY))
        self.assertAlmostEqual(small.mantissa, 300.0, places=9)

    def test_window_edges(self):
        self.assertEqual(lm_from_float(1e15).level, 0)
        self.assertEqual(lm_from_float(1e-15).level, 0)
        self.assertEqual(lm_from_float(2e15).level, 1)
        self.assertEqual(lm_from_float(1e-16).level, 1)

    def test_rejects(self):
        for bad in (0.0, -1.0, math.inf, math.nan):
            with self.assertRaises(MagnitudeError):
                lm_from_float(bad)
        with self.assertRaises(TypeError):
            lm_from_float('1')
        with self.assertRaises(MagnitudeError):
            LeveledMagnitude(1, HUGE, 3.0)
        with self.assertRaises(MagnitudeError):
            LeveledMagnitude(0, HUGE, 3.0)

    def test_round_trip_level0(self):
        for x in (1e-15, 3.5e-7, 1.0, 2.0 ** 0.5, 123456.789, 9.99e14):
            self.assertLess(_rel(lm_from_float(x).to_float(), x), 1e-12)


class TestOperations(unittest.TestCase):
    def test_pow(self):
        r = lm_pow(lm_from_float(1e10), 1e10)
        self.assertEqual((r.level, r.branch), (1, HUGE))
        self.assertLess(_rel(r.mantissa, 1e11), 1e-9)

    def test_inverse_law(self):
        for x in (lm_from_float(3.0), lm_from_float(1e200), parse_magnitude('10^-(10^40)')):
            one = lm_mul(x, lm_recip(x))
            self.assertLess(abs(one.to_float() - 1.0), 1e-9)

    def test_compare_stacked(self):
        a = parse_magnitude('10^+(10^20)')
        b = parse_magnitude('10^+(10^19)')
        self.assertEqual(a.level, 2)
        self.assertEqual(lm_compare(a, b), 1)
        self.assertEqual(lm_compare(b, a), -1)
        self.assertEqual(lm_compare(a, a), 0)
        self.assertEqual(lm_compare(lm_recip(a), lm_recip(b)), -1)

    def test_order_across_branches(self):
        values = [parse_magnitude('10^-(10^30)'), lm_from_float(1e-100), lm_from_float(0.5),
                  lm_from_float(7.0), lm_from_float(1e100), parse_magnitude('10^+(10^30)')]
        for i, x in enumerate(values):
            for j, y in enumerate(values):
                self.assertEqual(lm_compare(x, y), (i > j) - (i < j))

    def test_log_exp_round_trip(self):
        for x in (lm_from_float(42.0), lm_from_float(1e-250), parse_magnitude('10^+(10^9939.8)'),
                  parse_magnitude('10^-(10^(10^20.5))')):
            back = lm_exp10(lm_log10(x))
            self.assertEqual((back.level, back.branch), (x.level, x.branch))
            self.assertLess(_rel(back.mantissa, x.mantissa), 1e-9)

    def test_homomorphism(self):
        a, b = lm_from_float(1e200), lm_from_float(1e-50)
        lhs = lm_log10(lm_mul(a, b)).to_float()
        rhs = lm_add_dominant(lm_log10(a), lm_log10(b)).to_float()
        self.assertLess(_rel(lhs, rhs), 1e-9)
        self.assertLess(_rel(lhs, 150.0), 1e-9)

    def test_add_dominant(self):
        self.assertEqual(lm_add_dominant(lm_from_float(2.0), lm_from_float(3.0)).to_float(), 5.0)
        big = parse_magnitude('10^+(10^20)')
        self.assertEqual(lm_add_dominant(big, lm_from_float(1e200)), big)
        x = SignedMagnitude.from_float(-2.5) + SignedMagnitude.from_float(1.0)
        self.assertEqual(x.to_float(), -1.5)
        huge = SignedMagnitude(False, parse_magnitude('10^+400'))
        self.assertEqual(huge - 1e3, huge)

    def test_cancellation_flagged(self):
        # one ulp apart at level 2, a few decades apart in value
        a = SignedMagnitude(False, LeveledMagnitude(2, HUGE, 15.01))
        b = SignedMagnitude(True, LeveledMagnitude(2, HUGE, math.nextafter(15.01, 0.0)))
        with self.assertRaises(MagnitudeError):
            lm_add_dominant(a, b)
        self.assertTrue((a - a).is_zero())

    def test_ceil(self):
        self.assertEqual(lm_ceil(lm_from_float(3599.2)).to_int(), 3600)
        self.assertEqual(lm_ceil(lm_from_float(1e-30)).to_int(), 1)
        big = parse_magnitude('10^+50')
        self.assertIs(lm_ceil(big), big)

    def test_float_agreement(self):
        rng = stream(5, 'magnitude-test')
        xs = 10.0 ** rng.uniform(-7, 7, size=2000)
        ys = 10.0 ** rng.uniform(-7, 7, size=2000)
        es = rng.uniform(-2, 2, size=2000)
        for x, y, e in zip(xs, ys, es):
            a, b = lm_from_float(x), lm_from_float(y)
            self.assertLess(_rel(lm_mul(a, b).to_float(), x * y), 1e-12)
            self.assertLess(_rel((a + b).to_float(), x + y), 1e-12)
            self.assertLess(_rel(lm_recip(a).to_float(), 1.0 / x), 1e-12)
            if abs(e) > 1e-3:
                self.assertLess(_rel(lm_pow(a, e).to_float(), x ** e), 1e-12)
            self.assertLess(_rel(lm_log10(a).to_float(), math.log10(x)), 1e-12)
            self.assertEqual(lm_compare(a, b), (x > y) - (x < y))

    def test_add_above_level0(self):
        s = lm_from_float(1e20) + lm_from_float(1e19)
        self.assertEqual((s.level, s.branch), (1, HUGE))
        self.assertLess(_rel(s.mantissa, math.log10(1.1e20)), 1e-12)
        twice = parse_magnitude('10^+400') + parse_magnitude('10^+400')
        self.assertLess(_rel(twice.mantissa, 400.0 + math.log10(2.0)), 1e-12)
        tiny = lm_from_float(1e-20) + lm_from_float(1e-21)
        self.assertEqual((tiny.level, tiny.branch), (1, TINY))
        self.assertLess(_rel(tiny.mantissa, -math.log10(1.1e-20)), 1e-12)
        a, b = parse_magnitude('10^+(10^20)'), parse_magnitude('10^+(10^19)')
        self.assertEqual(a + b, a)

    def test_mul_above_level0(self):
        a, b = parse_magnitude('10^+(10^20)'), parse_magnitude('10^+(10^19)')
        r = lm_mul(a, b)
        self.assertEqual((r.level, r.branch), (2, HUGE))
        self.assertLess(_rel(r.mantissa, math.log10(1.1e20)), 1e-12)
        r = lm_mul(lm_recip(a), lm_recip(b))
        self.assertEqual((r.level, r.branch), (2, TINY))
        self.assertLess(_rel(r.mantissa, math.log10(1.1e20)), 1e-12)
        self.assertLess(_rel(lm_mul(lm_from_float(1e200), lm_from_float(1e200)).mantissa, 400.0), 1e-12)
        c, d = parse_magnitude('10^+(10^(10^20))'), parse_magnitude('10^+(10^(10^19))')
        self.assertEqual(lm_mul(c, d), c)

    def test_opposite_signs_above_level0(self):
        x = 10.0 ** 15.2666
        diff = SignedMagnitude(True, LeveledMagnitude(1, HUGE, 15.2666)) + 2.0
        self.assertTrue(diff.negative)
        self.assertLess(_rel(diff.to_float(), 2.0 - x), 1e-12)
        a = SignedMagnitude(False, parse_magnitude('10^+400'))
        b = SignedMagnitude(True, parse_magnitude('10^+399.7'))
        r = lm_add_dominant(a, b)
        self.assertFalse(r.negative)
        self.assertLess(_rel(r.magnitude.mantissa, 400.0 + math.log10(1.0 - 10.0 ** -0.3)), 1e-12)
        r = lm_add_dominant(b, a)
        self.assertLess(_rel(r.magnitude.mantissa, 400.0 + math.log10(1.0 - 10.0 ** -0.3)), 1e-12)

    def test_pow_rejects_zero_exponent(self):
        with self.assertRaises(MagnitudeError):
            lm_pow(lm_from_float(2.0), 0)


LEVEL_SAMPLES = 25000


def _random_magnitude(rng, level, branch):
    if level == 0:
        return lm_from_float(10.0 ** rng.uniform(-14.5, 14.5))
    return LeveledMagnitude(level, branch, 10.0 ** rng.uniform(1.2, 14.9))


def _rank(x):
    if x.level == 0:
        return (0, math.log10(x.mantissa))
    if x.branch == HUGE:
        return (x.level, x.mantissa)
    return (-x.level, -x.mantissa)


class TestLevels(unittest.TestCase):
    """Randomized round trip, order and log homomorphism over levels 0 to 3"""
    KINDS = [(0, UNIT)] + [(level, branch) for level in (1, 2, 3) for branch in (HUGE, TINY)]

    def _draw(self, rng):
        level, branch = self.KINDS[rng.integers(len(self.KINDS))]
        return _random_magnitude(rng, level, branch)

    def test_round_trip(self):
        rng = stream(11, 'levels-round-trip')
        for _ in range(LEVEL_SAMPLES):
            x = self._draw(rng)
            back = lm_exp10(lm_log10(x))
            self.assertEqual((back.level, back.branch), (x.level, x.branch))
            self.assertLess(_rel(back.mantissa, x.mantissa), 1e-12)

    def test_order(self):
        rng = stream(12, 'levels-order')
        for _ in range(LEVEL_SAMPLES):
            x, y = self._draw(rng), self._draw(rng)
            expected = (_rank(x) > _rank(y)) - (_rank(x) < _rank(y))
            self.assertEqual(lm_compare(x, y), expected)
            lx, ly = lm_log10(x), lm_log10(y)
            self.assertEqual((lx > ly) - (lx < ly), expected)

    def test_homomorphism_native_logs(self):
        # levels 0 and 1 have float logarithms, so log10(a b) = log10 a + log10 b in float64
        rng = stream(13, 'levels-homomorphism')
        for _ in range(LEVEL_SAMPLES):
            a = _random_magnitude(rng, int(rng.integers(2)), (HUGE, TINY)[rng.integers(2)])
            b = _random_magnitude(rng, int(rng.integers(2)), (HUGE, TINY)[rng.integers(2)])
            la, lb = lm_log10(a).to_float(), lm_log10(b).to_float()
            lhs = lm_log10(lm_mul(a, b)).to_float()
            self.assertLessEqual(abs(lhs - (la + lb)), 1e-12 * max(abs(la), abs(lb), 1.0))

    def test_homomorphism_stacked(self):
        # same-branch products at level 2 add exponents, at level 3 the larger one absorbs
        rng = stream(14, 'levels-homomorphism-stacked')
        for _ in range(LEVEL_SAMPLES):
            branch = (HUGE, TINY)[rng.integers(2)]
            a, b = _random_magnitude(rng, 2, branch), _random_magnitude(rng, 2, branch)
            r = lm_mul(a, b)
            self.assertEqual((r.level, r.branch), (2, branch))
            expected = np.logaddexp(a.mantissa * math.log(10.0), b.mantissa * math.log(10.0)) / math.log(10.0)
            self.assertLess(_rel(r.mantissa, expected), 1e-12)
            c, d = _random_magnitude(rng, 3, branch), _random_magnitude(rng, 3, branch)
            self.assertEqual(lm_mul(c, d), max(c, d) if branch == HUGE else min(c, d))


class TestText(unittest.TestCase):
    def test_format(self):
        self.assertEqual(format_magnitude(lm_from_float(3600.0)), '3600.0')
        self.assertEqual(format_magnitude(parse_magnitude('10^-4969.76')), '10^-4969.76')
        self.assertEqual(str(parse_magnitude('10^+(10^9939.82)')), '10^+(10^9939.82)')
        self.assertEqual(str(parse_magnitude('10^+(10^(10^20.5))')), '10^+(10^(10^20.5))')

    def test_parse_reparses_output(self):
        for x in (lm_from_float(0.125), lm_from_float(1e-40), parse_magnitude('10^+(10^123.5)')):
            y = parse_magnitude(format_magnitude(x, precision=17))
            self.assertEqual((y.level, y.branch), (x.level, x.branch))
            self.assertLess(_rel(y.mantissa, x.mantissa), 1e-12)

    def test_parse_rejects(self):
        for bad in ('abc', '10^40', '10^+(2^40)', '10^+x'):
            with self.assertRaises(MagnitudeError):
                parse_magnitude(bad)

    def test_parse_zero(self):
        self.assertTrue(parse_magnitude('0').is_zero())

    def test_numpy_scalars(self):
        self.assertEqual(lm_from_float(np.float64(2.0)).to_float(), 2.0)


if __name__ == "__main__":
    unittest.main()
