"""Counter-based random streams.

Every stream is a Philox generator keyed by the user seed, with the
remaining counter words selecting (trial, stream id). Streams never
depend on how many draws were taken elsewhere, so trials can run in any
order or in parallel.
"""

import numpy as np

STREAM_INIT = 1
STREAM_PAL = 2
STREAM_EDL = 3


def counter_rng(seed: int, index: int, stream: int) -> np.random.Generator:
    if seed < 0 or index < 0:
        raise ValueError("seed and index must be non-negative")
    bits = np.random.Philox(key=int(seed), counter=[0, 0, int(index), int(stream)])
    return np.random.Generator(bits)
