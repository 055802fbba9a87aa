"""Named deterministic random substreams.

Every random draw in the simulator comes from a stream identified by
``(master seed, purpose label, *indices)``. Two runs with the same seed
therefore consume identical randomness regardless of call order.
"""

from __future__ import annotations

import hashlib
import random

import numpy as np


def derive_seed(seed: int, label: str, *indices: int | str) -> int:
    """Hash a stream name down to a 256-bit integer seed."""
    h = hashlib.sha256()
    h.update(str(int(seed)).encode())
    h.update(b"\x00" + label.encode())
    for ix in indices:
        h.update(b"\x00" + str(ix).encode())
    return int.from_bytes(h.digest(), "big")


def substream(seed: int, label: str, *indices: int | str) -> random.Random:
    """A stdlib generator for arbitrary-precision ring draws."""
    return random.Random(derive_seed(seed, label, *indices))


def philox_key(seed: int, label: str, *indices: int | str) -> int:
    # Philox takes a 128-bit key
    return derive_seed(seed, label, *indices) >> 128


def counter_generator(key: int, start_word: int) -> np.random.Generator:
    """A generator positioned at raw-word ``start_word`` of the keyed stream.

    Philox is counter based: word ``i`` of the stream is a pure function of
    ``(key, i)``, so any slice can be produced independently.
    """
    block, skip = divmod(start_word, 4)
    gen = np.random.Generator(np.random.Philox(key=key, counter=block))
    if skip:
        gen.random(skip)  # one raw word per double
    return gen
