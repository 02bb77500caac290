"""Seeded Philox streams keyed by ``(seed, purpose, *indices)``.

Philox is counter-based, so a key always maps to the same draws regardless of
how many other streams exist or the order in which they are consumed.
"""

import numpy as np

from .errors import InputError

# stream purposes
SAMPLING = 0
FOV = 1
SDP_INIT = 2
SWEEP = 3


def stream(seed, *keys):
    """Independent generator for ``(seed, *keys)``."""
    try:
        words = [int(seed), *(int(k) for k in keys)]
    except (TypeError, ValueError):
        raise InputError("seeds and stream keys must be integers") from None
    if any(w < 0 for w in words):
        raise InputError("seeds and stream keys must be nonnegative")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(words)))
