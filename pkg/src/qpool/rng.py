"""Per-trial random streams keyed by (seed, trial index).

Philox is a counter-based generator: the stream for a trial depends only on
the seed and the trial number, so work can be split over any number of
workers without changing results.
"""

import numpy as np

MASK64 = (1 << 64) - 1

SAMPLER = 0
SIMULATOR = 1


def trial_rng(seed: int, trial: int, stream: int = SAMPLER) -> np.random.Generator:
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed {seed} is not a 64-bit value")
    return np.random.Generator(np.random.Philox(key=seed, counter=[trial, stream, 0, 0]))


def parse_seed(text: str) -> int:
    """Parse a 64-bit hex seed such as ``0x5eed`` or ``deadbeef``."""
    value = int(text, 16)
    if not 0 <= value <= MASK64:
        raise ValueError(f"seed {text!r} does not fit in 64 bits")
    return value
