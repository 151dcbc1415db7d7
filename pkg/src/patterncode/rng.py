"""Seeded randomness.  Every random choice in the package flows from here."""

from __future__ import annotations

import numpy as np

DEFAULT_SEED = 20240531


def make_rng(seed: int | None = None, *stream: int) -> np.random.Generator:
    """Generator for ``seed``; extra integers select an independent child stream."""
    ss = np.random.SeedSequence(DEFAULT_SEED if seed is None else int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.default_rng(ss)
