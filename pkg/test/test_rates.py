# License: LGPL-3.0+

import math
import unittest

from cesaro.errors import ConstantError, IterationError
from cesaro.magnitude import LeveledMagnitude, HUGE, TINY, lm_from_float, lm_log10, lm_recip, parse_magnitude
from cesaro.moduli import ModulusSpec, HilbertModulus, TableModulus, parse_modulus
from cesaro.pisier import rademacher_profile
from cesaro.rates import (shrink_xi, iterate_xi, p_tilde, rate_plan, hilbert_rate, RatePlan,
                          CLOSED, EXPLICIT)


LOG10_24 = math.log10(24.0)


def _log10(x):
    return lm_log10(x).to_float()


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


class NoBranchModulus(ModulusSpec):
    def eta(self, eps):
        return 0.5

    def log_eta(self, u):
        return math.log(0.5)

    def spec(self):
        return 'no-branch'


class TestShrink(unittest.TestCase):
    def test_shrink_xi(self):
        h = HilbertModulus()
        self.assertAlmostEqual(shrink_xi(h, 1.0, 1.0), h.eta(1.0) / 12, places=15)
        self.assertAlmostEqual(shrink_xi(h, 1.0, 1.0), 0.011165, places=6)
        const = parse_modulus('table:const_half')
        for b in (0.5, 1.0, 7.0):
            for t in (1e-3, 0.4, 3.0):
                self.assertAlmostEqual(shrink_xi(const, b, t), t / 24, places=15)
                self.assertLessEqual(shrink_xi(h, b, t), t / 12)
                self.assertLess(shrink_xi(h, b, t), t)

    def test_shrink_xi_magnitude(self):
        const = parse_modulus('table:const_half')
        t = parse_magnitude('10^-400')
        value = shrink_xi(const, 1.0, t)
        self.assertAlmostEqual(_log10(value), -400 - LOG10_24, places=9)
        with self.assertRaises(ValueError):
            shrink_xi(const, 1.0, 0.0)


class TestIterate(unittest.TestCase):
    def test_zero_iterations(self):
        h = HilbertModulus()
        self.assertEqual(iterate_xi(h, 1.0, 0.3, 0).to_float(), 0.3)
        self.assertEqual(iterate_xi(h, 1.0, 0.3, LeveledMagnitude.zero()).to_float(), 0.3)

    def test_geometric(self):
        const = parse_modulus('table:const_half')
        expected = -1 - 3600 * LOG10_24
        for method in (EXPLICIT, CLOSED):
            value = iterate_xi(const, 1.0, 0.1, 3600, method)
            self.assertEqual((value.level, value.branch), (1, TINY))
            self.assertLess(_rel(_log10(value), expected), 1e-6)

    def test_closed_matches_explicit(self):
        cases = (('hilbert', 1e-3, 5), ('hilbert', 1e-4, 8), ('lp:p=2', 0.05, 20), ('lp:p=1.5', 1.0, 25),
                 ('power:c=0.25,s=1', 1.5, 30), ('table:const_half', 0.1, 10**4))
        for text, t0, k in cases:
            m = parse_modulus(text)
            closed = _log10(iterate_xi(m, 1.0, t0, k, CLOSED))
            explicit = _log10(iterate_xi(m, 1.0, t0, k, EXPLICIT))
            self.assertLess(_rel(closed, explicit), 1e-6, text)

    def test_leading_steps(self):
        # t0/b far above 2: explicit steps first, then the power branch
        m = parse_modulus('power:c=0.25,s=1')
        closed = _log10(iterate_xi(m, 1.0, 500.0, 8, CLOSED))
        explicit = _log10(iterate_xi(m, 1.0, 500.0, 8, EXPLICIT))
        self.assertLess(_rel(closed, explicit), 1e-9)

    def test_closed_from_table_breakpoint(self):
        # at eps = 1.0 the table already takes its second step
        m = TableModulus([(0.5, 0.1), (1.0, 0.3), (2.0, 0.4)])
        self.assertFalse(m.power_branch().closed)
        closed = _log10(iterate_xi(m, 1.0, 1.0, 10, CLOSED))
        explicit = _log10(iterate_xi(m, 1.0, 1.0, 10, EXPLICIT))
        expected = math.log10(0.3 / 12) + 9 * math.log10(0.1 / 12)
        self.assertLess(_rel(explicit, expected), 1e-12)
        self.assertLess(_rel(closed, explicit), 1e-9)

    def test_small_bound_explicit(self):
        # log10 t passes -1e15 around step 31 and keeps tripling
        h = HilbertModulus()
        short = _log10(iterate_xi(h, 0.01, 1e-4, 4, EXPLICIT))
        t = 1e-4
        for _ in range(4):
            t = shrink_xi(h, 0.01, t)
        self.assertLess(_rel(short, math.log10(t)), 1e-9)
        v39 = iterate_xi(h, 0.01, 1e-4, 39, EXPLICIT)
        v40 = iterate_xi(h, 0.01, 1e-4, 40, EXPLICIT)
        for value in (v39, v40):
            self.assertEqual((value.level, value.branch), (2, TINY))
        self.assertAlmostEqual(v40.mantissa - v39.mantissa, math.log10(3.0), places=9)
        self.assertAlmostEqual(v40.mantissa, math.log10(2 + math.log10(96.0) / 2) + 40 * math.log10(3.0),
                               delta=1e-6)

    def test_huge_count(self):
        const = parse_modulus('table:const_half')
        k = parse_magnitude('10^+30')
        value = iterate_xi(const, 1.0, 0.1, k)
        self.assertEqual((value.level, value.branch), (2, TINY))
        self.assertAlmostEqual(value.mantissa, 30 + math.log10(LOG10_24), places=6)

    def test_errors(self):
        with self.assertRaises(IterationError):
            iterate_xi(NoBranchModulus(), 1.0, 0.1, parse_magnitude('10^+20'))
        with self.assertRaises(IterationError):
            iterate_xi(HilbertModulus(), 1.0, 0.1, parse_magnitude('10^+20'), EXPLICIT)
        with self.assertRaises(IterationError):
            iterate_xi(HilbertModulus(), 1.0, 0.1, -1)
        with self.assertRaises(IterationError):
            iterate_xi(HilbertModulus(), 1.0, 0.1, lm_from_float(2.5))
        with self.assertRaises(ValueError):
            iterate_xi(HilbertModulus(), 1.0, 0.1, 3, 'sideways')
        # small native counts never need the closed form
        self.assertGreater(iterate_xi(NoBranchModulus(), 1.0, 0.1, 3).to_float(), 0)


class TestPTilde(unittest.TestCase):
    def test_known_values(self):
        self.assertEqual(p_tilde(0.9, 1.0, 2.0, 3.0).to_int(), 3600)
        self.assertEqual(p_tilde(18.0, 1.0, 2.0, 1.0).to_int(), 1)
        with self.assertRaises(ConstantError):
            p_tilde(0.9, 1.0, 1.0, 3.0)

    def test_minimal(self):
        for eps, b, q, C in ((0.9, 1.0, 2.0, 3.0), (0.5, 2.0, 1.5, 4.0), (0.1, 1.0, 1.8, 1.2)):
            n = p_tilde(eps, b, q, C).to_int()
            self.assertLessEqual(2 * C * n ** ((1 - q) / q), eps / (9 * b) * (1 + 1e-12))
            if n > 1:
                self.assertGreater(2 * C * (n - 1) ** ((1 - q) / q), eps / (9 * b))

    def test_grows_as_q_tends_to_one(self):
        values = [p_tilde(0.9, 1.0, q, 3.0) for q in (2.0, 1.5, 1.1, 1.01, 1.001)]
        for a, b in zip(values, values[1:]):
            self.assertLess(a, b)
        self.assertEqual((values[-1].level, values[-1].branch), (1, HUGE))


class TestRatePlan(unittest.TestCase):
    def test_const_half_oracle(self):
        m = parse_modulus('table:const_half')
        plan = rate_plan(0.9, 1.0, m, q=2.0, C_q=3.0)
        self.assertEqual(plan.p_tilde.to_int(), 3600)
        self.assertLess(_rel(_log10(plan.delta), -1 - 3600 * LOG10_24), 1e-6)
        self.assertEqual((plan.p.level, plan.p.branch), (1, HUGE))
        self.assertAlmostEqual(plan.p.mantissa, 9939.7, delta=0.5)
        self.assertEqual((plan.alpha.level, plan.alpha.branch), (2, TINY))
        self.assertAlmostEqual(plan.alpha.mantissa, 9939.8, delta=0.5)
        self.assertEqual((plan.N.level, plan.N.branch), (2, HUGE))
        self.assertAlmostEqual(plan.N.mantissa, 9939.8, delta=0.5)
        self.assertLess(plan.alpha, 0.3)
        self.assertTrue(plan.margin_absorbed)

    def test_small_plan_margin(self):
        # alpha keeps its strictness margin when the bound is only one level deep
        m = parse_modulus('table:const_half')
        plan = rate_plan(20.0, 1.0, m, q=2.0, C_q=1.0)
        self.assertEqual(plan.p_tilde.to_int(), 1)
        self.assertFalse(plan.margin_absorbed)
        self.assertLess(plan.alpha, plan.eps / 3)
        self.assertGreaterEqual(plan.N, lm_recip(plan.alpha))

    def test_power_plan(self):
        plan = rate_plan(1.0, 1.0, parse_modulus('lp:p=2'), q=2.0, C_q=1.0)
        self.assertEqual(plan.p_tilde.to_int(), 324)
        self.assertEqual(plan.delta.branch, TINY)
        self.assertEqual(plan.N.branch, HUGE)
        self.assertGreater(plan.N.level, plan.p.level)
        self.assertTrue(plan.csv_row().startswith('"power:c=0.125,s=2.0",1.0,'))

    def test_hilbert_profile_plan(self):
        m = HilbertModulus()
        profile = rademacher_profile(1 - math.sqrt(3) / 2)
        plan = rate_plan(0.9, 1.0, m, profile=profile)
        self.assertEqual(plan.q, profile.q)
        self.assertEqual(plan.p_tilde.branch, HUGE)
        self.assertEqual(plan.N.branch, HUGE)
        self.assertLess(plan.alpha, 0.3)

    def test_rendering(self):
        plan = rate_plan(0.9, 1.0, parse_modulus('table:const_half'), q=2.0, C_q=3.0)
        lines = plan.lines()
        self.assertIn('p_tilde=3600.0', lines)
        self.assertIn('modulus=table:const_half', lines)
        self.assertTrue(any(_.startswith('N=10^+(10^9939') for _ in lines))
        row = plan.csv_row().split(',')
        self.assertEqual(len(row), len(RatePlan.CSV_FIELDS))
        self.assertEqual(RatePlan.csv_header().split(',')[0], 'modulus')

    def test_needs_constants(self):
        with self.assertRaises(ValueError):
            rate_plan(0.9, 1.0, HilbertModulus())
        with self.assertRaises(ValueError):
            rate_plan(0.0, 1.0, HilbertModulus(), q=2.0, C_q=1.0)


class TestHilbertRate(unittest.TestCase):
    def test_known_values(self):
        self.assertEqual(hilbert_rate(0.01, 1.0), 10000)
        self.assertEqual(hilbert_rate(2.0, 1.0), 1)
        self.assertEqual(hilbert_rate(1.0, 2.0), 4)
        self.assertEqual(hilbert_rate(0.3, 1.0), 12)
        with self.assertRaises(ValueError):
            hilbert_rate(0.0, 1.0)


if __name__ == "__main__":
    unittest.main()
