"""Seeded, splittable randomness.

Child generators are Mersenne Twister instances seeded from a BLAKE2b
digest of the parent seed and a path of integer keys, so trial ``i`` of a
search sees the same stream no matter how trials are scheduled.
"""

from __future__ import annotations

import hashlib
import random

MASK64 = (1 << 64) - 1


def derive_seed(seed: int, *keys: int) -> int:
    h = hashlib.blake2b(digest_size=8)
    for part in (seed, *keys):
        h.update((int(part) & MASK64).to_bytes(8, "little"))
    return int.from_bytes(h.digest(), "little")


def derive_rng(seed: int, *keys: int) -> random.Random:
    return random.Random(derive_seed(seed, *keys))
