"""Labeled random streams derived from one 64-bit master seed."""

from __future__ import annotations

import zlib

import numpy as np

MAX_SEED = 2**64 - 1


def check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be a non-negative 64-bit integer, got {seed}")
    return int(seed)


def stream(seed: int, label: str, index: int = 0) -> np.random.Generator:
    """Independent generator for stage ``label`` and shot ``index``.

    The stream depends only on ``(seed, label, index)``, so adding a stage or
    reordering calls never shifts another stage's draws.
    """
    key = (zlib.crc32(label.encode("utf-8")), int(index))
    return np.random.default_rng(np.random.SeedSequence(check_seed(seed), spawn_key=key))
