# License: LGPL-3.0+

"""
Seeded, labelled random streams.

Every consumer asks for a stream by ``(seed, label, block)``. The label and
seed are hashed into a 128-bit Philox key, and the block index sits in the
high word of the Philox counter, so trial block 7 of the rademacher check is
the same sequence no matter which other checks ran before it.
"""

try:
    # pyblake2
    from pyblake2 import blake2b
except ImportError:
    from hashlib import blake2b

import numpy as np


DEFAULT_SEED = 1


def derive_key(seed, label):
    """128-bit Philox key from the user seed and a stream label"""
    if isinstance(label, str):
        label = label.encode('utf-8')
    data = int(seed).to_bytes(16, 'little', signed=True) + b'_' + label
    digest = blake2b(data, digest_size=16).digest()
    return int.from_bytes(digest, 'little')


def stream(seed=DEFAULT_SEED, label=b'default', block=0):
    """
    numpy Generator over Philox, independent per (seed, label, block)
    """
    if block < 0:
        raise ValueError("Block index must be non-negative")
    counter = [0, 0, 0, int(block)]
    bit_generator = np.random.Philox(key=derive_key(seed, label), counter=counter)
    return np.random.Generator(bit_generator)
