# License: LGPL-3.0+

import math
import unittest

from cesaro.errors import ConstantError
from cesaro.moduli import HilbertModulus, PowerModulus, TableModulus, parse_modulus
from cesaro.pisier import (delta_from_modulus, lambda_from_delta, mu2_bound, nu2_bound, solve_xi,
                           min_p_prime, kahane_constant, c_nq_constant, convert_constants,
                           rademacher_profile, rademacher_profile_mp, TYPE_TO_MOMENT, MOMENT_TO_TYPE)


HILBERT_DELTA = 1 - math.sqrt(3) / 2


def _xi_constraint(xi):
    return (1.0 - xi) / (1.0 + 2.0 * math.sqrt(2.0 * xi))


class TestPieces(unittest.TestCase):
    def test_delta_from_modulus(self):
        self.assertAlmostEqual(delta_from_modulus(HilbertModulus()), HILBERT_DELTA, places=15)
        self.assertEqual(delta_from_modulus(PowerModulus(0.25, 1)), 0.25)
        for text in ('hilbert', 'lp:p=1.5', 'lp:p=4', 'table:const_half'):
            self.assertLessEqual(delta_from_modulus(parse_modulus(text)), 0.5)
        with self.assertRaises(ConstantError):
            delta_from_modulus(TableModulus([(2.0, 0.75)]))

    def test_lambda(self):
        self.assertEqual(lambda_from_delta(0.25), 0.75)
        for bad in (0.0, 1.0, 1.5):
            with self.assertRaises(ConstantError):
                lambda_from_delta(bad)
        with self.assertLogs('cesaro.pisier', level='WARNING'):
            lambda_from_delta(0.75)

    def test_mu2_bound(self):
        self.assertAlmostEqual(mu2_bound(0.0), math.sqrt(2) / 2, places=15)
        self.assertAlmostEqual(mu2_bound(math.sqrt(3) / 2), 0.5 * math.sqrt(3.5), places=15)
        self.assertAlmostEqual(mu2_bound(0.9), 0.5 * math.sqrt(3.62), places=15)
        with self.assertRaises(ConstantError):
            mu2_bound(1.0)

    def test_solve_xi(self):
        xi = solve_xi(0.935414)
        self.assertAlmostEqual(xi, 5.85e-4, delta=5e-6)
        self.assertGreaterEqual(_xi_constraint(xi), 0.935414)
        xi = solve_xi(0.70711)
        self.assertAlmostEqual(xi, 1.878e-2, delta=1e-4)
        self.assertGreaterEqual(_xi_constraint(xi), 0.70711)
        # maximal: one ulp up already violates
        self.assertLess(_xi_constraint(math.nextafter(xi, 1.0) * (1 + 1e-12)), 0.70711)
        with self.assertRaises(ConstantError):
            solve_xi(1.0)

    def test_min_p_prime(self):
        self.assertEqual(min_p_prime(0.5), 2.0)
        self.assertAlmostEqual(min_p_prime(5.85e-4), 1184.5, delta=0.1)
        self.assertEqual(min_p_prime(1 - 1e-12), 2.0)
        xi = 5.85e-4
        self.assertGreaterEqual(2.0 ** (-1.0 / min_p_prime(xi)), 1.0 - xi)

    def test_kahane_constant(self):
        self.assertEqual(kahane_constant(2), 3.0)
        self.assertAlmostEqual(kahane_constant(1.5), 2.0, places=12)
        self.assertAlmostEqual(kahane_constant(1.0001), 1.0, delta=1e-3)
        with self.assertRaises(ConstantError):
            kahane_constant(1.0)

    def test_convert(self):
        self.assertEqual(convert_constants(5, TYPE_TO_MOMENT), 15)
        self.assertEqual(convert_constants(7, MOMENT_TO_TYPE), 7)
        self.assertEqual(convert_constants(convert_constants(2.0, TYPE_TO_MOMENT), MOMENT_TO_TYPE), 6.0)
        with self.assertRaises(ValueError):
            convert_constants(1.0, 'sideways')

    def test_nu2_bound(self):
        self.assertEqual(nu2_bound(0.25), 0.75)
        with self.assertRaises(ConstantError):
            nu2_bound(0.0)


class TestProfile(unittest.TestCase):
    def test_hilbert_profile(self):
        profile = rademacher_profile(HILBERT_DELTA)
        self.assertAlmostEqual(profile.mu2_bound, 0.5 * math.sqrt(3.5), places=12)
        self.assertAlmostEqual(profile.q, 1.000423, delta=1e-6)
        self.assertTrue(2.0e4 <= profile.C_q <= 2.1e4)
        self.assertAlmostEqual(1 / profile.p_conj + 1 / profile.p_prime, 1.0, places=12)
        self.assertTrue(1 < profile.q < profile.p_conj)
        self.assertEqual(profile.c_q, 3 * profile.C_q)
        self.assertEqual(profile.sum_constant, 2 * profile.C_q)
        self.assertAlmostEqual(profile.K_q, kahane_constant(profile.q), places=15)

    def test_constraints_exact(self):
        for delta in (HILBERT_DELTA, 0.01, 0.25, 0.5, 0.9):
            profile = rademacher_profile(delta)
            self.assertGreaterEqual(_xi_constraint(profile.xi_prob), profile.mu2_bound)
            self.assertGreaterEqual(2.0 ** (-1.0 / profile.p_prime), 1.0 - profile.xi_prob)

    def test_matches_mpmath(self):
        for delta in (HILBERT_DELTA, 0.25, 0.4):
            fast = rademacher_profile(delta)
            exact = rademacher_profile_mp(delta)
            for key in ('xi_prob', 'p_prime', 'p_conj', 'q', 'C_q'):
                a, b = getattr(fast, key), float(getattr(exact, key))
                self.assertLess(abs(a - b) / abs(b), 1e-6, key)

    def test_monotone_in_delta(self):
        profiles = [rademacher_profile(_) for _ in (0.01, 0.05, HILBERT_DELTA, 0.25, 0.5)]
        for a, b in zip(profiles, profiles[1:]):
            self.assertLessEqual(a.p_conj, b.p_conj)
            self.assertGreaterEqual(a.C_q, b.C_q)

    def test_theta(self):
        low = rademacher_profile(0.25, theta=0.5)
        high = rademacher_profile(0.25, theta=0.9)
        self.assertGreater(high.q, low.q)
        self.assertLess(high.p_conj - high.q, low.p_conj - low.q)
        with self.assertRaises(ConstantError):
            rademacher_profile(0.25, theta=1.0)

    def test_c_nq_matches_type_constant(self):
        profile = rademacher_profile(0.25)
        value = c_nq_constant(2, profile.q, profile.p_conj)
        self.assertLess(abs(value - profile.C_q) / profile.C_q, 1e-6)
        with self.assertRaises(ConstantError):
            c_nq_constant(1, profile.q, profile.p_conj)

    def test_rejects(self):
        for bad in (0.0, 1.0, 1.5, -0.2):
            with self.assertRaises(ConstantError):
                rademacher_profile(bad)

    def test_lines(self):
        lines = rademacher_profile(0.25).lines()
        self.assertTrue(lines[0].startswith('delta=0.25'))
        self.assertEqual(len(lines), 12)


if __name__ == "__main__":
    unittest.main()
