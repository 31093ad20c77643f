"""Named RNG sub-streams derived from a single user-facing seed, so that e.g.
graph generation and the random baseline stay decoupled."""

from __future__ import annotations

import zlib

import numpy as np


def substream(seed: int, name: str) -> np.random.Generator:
    """Independent generator for (seed, name); stable across runs."""
    return np.random.default_rng([int(seed) & 0xFFFFFFFF, zlib.crc32(name.encode())])
