"""Seeded random polynomial corpora."""

from __future__ import annotations

import numpy as np

from .series import Polynomial

DEFAULT_SEED = 0x5EED
MAX_DEGREE = 60


def random_polynomials(count: int, seed: int = DEFAULT_SEED, max_degree: int = MAX_DEGREE) -> list[Polynomial]:
    """Degrees uniform on ``0..max_degree``; coefficient ``k`` uniform on the
    unit square ``[0,1)^2`` scaled by ``1/(k+1)``."""
    if count < 0 or max_degree < 0:
        raise ValueError("count and max_degree must be nonnegative")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        deg = int(rng.integers(0, max_degree + 1))
        re, im = rng.random(deg + 1), rng.random(deg + 1)
        c = (re + 1j * im) / np.arange(1, deg + 2)
        out.append(Polynomial(tuple(c)))
    return out
