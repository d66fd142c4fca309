from typing import Union

import numpy as np

SeedLike = Union[int, np.random.Generator]


def replicate_rng(base_seed: int, index: int) -> np.random.Generator:
    """
    Random stream for replicate `index` of a study seeded with `base_seed`.

    Streams come from SeedSequence(base_seed, spawn_key=(index,)), so a
    replicate draws the same numbers whether it runs serially, in a thread
    pool, or alone.
    """
    return np.random.default_rng(np.random.SeedSequence(base_seed, spawn_key=(index,)))


def as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
