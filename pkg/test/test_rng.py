# License: LGPL-3.0+

import unittest

import numpy as np

from cesaro.rng import stream, derive_key, DEFAULT_SEED


class TestStreams(unittest.TestCase):
    def test_reproducible(self):
        a = stream(7, b'rademacher', 3).random(16)
        b = stream(7, b'rademacher', 3).random(16)
        self.assertTrue(np.array_equal(a, b))

    def test_independent(self):
        base = stream(7, b'rademacher', 0).random(16)
        for other in (stream(8, b'rademacher', 0), stream(7, b'maurey', 0), stream(7, b'rademacher', 1)):
            self.assertFalse(np.array_equal(base, other.random(16)))

    def test_keys(self):
        self.assertEqual(derive_key(1, 'label'), derive_key(1, b'label'))
        self.assertNotEqual(derive_key(1, b'label'), derive_key(-1, b'label'))
        self.assertLess(derive_key(DEFAULT_SEED, b'x'), 1 << 128)

    def test_rejects(self):
        with self.assertRaises(ValueError):
            stream(1, b'x', -1)


if __name__ == "__main__":
    unittest.main()
