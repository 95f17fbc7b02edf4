"""Deterministic, platform-stable random selection helpers.

Every randomized choice in the pipeline (mask selection, auxiliary
sampling, final shuffle) goes through this module so that identical
seeds produce identical outputs across runs, platforms, and Python
versions.  Only ``random.Random.random()`` is used, since that is the
one generator output with a cross-version stability guarantee.
"""

from __future__ import annotations

import hashlib
import random
from typing import Sequence, TypeVar

T = TypeVar("T")


def derive_rng(seed: int, salt: str) -> random.Random:
    """Build a generator keyed by (seed, salt) via SHA-256."""
    material = f"{seed}\x1f{salt}".encode("utf-8")
    digest = hashlib.sha256(material).digest()
    return random.Random(int.from_bytes(digest[:16], "big"))


def sample_without_replacement(items: Sequence[T], k: int, rng: random.Random) -> list[T]:
    """Uniform sample of k distinct items, via a partial Fisher-Yates pass."""
    if k > len(items):
        raise ValueError(f"cannot draw {k} items from {len(items)} without replacement")
    pool = list(items)
    for i in range(k):
        j = i + int(rng.random() * (len(pool) - i))
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:k]


def sample_with_replacement(items: Sequence[T], k: int, rng: random.Random) -> list[T]:
    """Uniform sample of k items, duplicates allowed."""
    if not items:
        raise ValueError("cannot sample from an empty sequence")
    return [items[int(rng.random() * len(items))] for _ in range(k)]


def shuffled(items: Sequence[T], seed: int, salt: str = "shuffle") -> list[T]:
    """Return a seeded permutation of items; the input is not mutated."""
    rng = derive_rng(seed, salt)
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = int(rng.random() * (i + 1))
        out[i], out[j] = out[j], out[i]
    return out
