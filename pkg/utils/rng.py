from __future__ import annotations

import numpy.random as npr

_MASK64 = (1 << 64) - 1


def make_rng(seed: int, stream: int = 0) -> npr.Generator:
    """PCG64 generator for (seed, stream).

    The same pair always gives the same draws; different streams are
    statistically independent (SeedSequence spawn keys).
    """
    ss = npr.SeedSequence(entropy=int(seed) & _MASK64, spawn_key=(int(stream) & _MASK64,))
    return npr.Generator(npr.PCG64(ss))
