"""
Treatment allocation: simple randomization and stratified permuted blocks.
"""
from dataclasses import dataclass
from typing import Dict, Hashable, List, Sequence, Tuple

import numpy as np

from ..model.errors import ScenarioError
from ..utils.rng import SeedLike, as_generator


@dataclass(frozen=True, order=True)
class StratumKey:
    levels: Tuple[int, ...]

    def __str__(self) -> str:
        return "-".join(str(level) for level in self.levels)


def simple_randomize(n: int, allocation: float = 0.5, rng: SeedLike = 0) -> np.ndarray:
    """Independent Bernoulli(allocation) assignments; 1 is treated."""
    if n < 2:
        raise ValueError(f"need at least two subjects to randomize, got {n}")
    if not 0 <= allocation <= 1:
        raise ValueError(f"allocation must lie in [0, 1], got {allocation}")
    return (as_generator(rng).random(n) < allocation).astype(int)


def nearest_rank_bins(values: np.ndarray, probabilities: Sequence[float]) -> np.ndarray:
    """
    Bin index of each value against the nearest-rank empirical quantiles at
    `probabilities`; a value equal to a cutpoint falls in the lower bin.
    """
    values = np.asarray(values, dtype=float)
    cuts = np.quantile(values, probabilities, method="inverted_cdf")
    return np.searchsorted(cuts, values, side="left")


def stratify(x1: np.ndarray, x2: np.ndarray) -> List[StratumKey]:
    """
    Strata formed by the level of x1 crossed with the empirical quartile of x2.

    A binary x1 is used as is; any other x1 is split at its nearest-rank median.
    """
    x1 = np.asarray(x1, dtype=float)
    if np.all(np.isin(x1, (0.0, 1.0))):
        first = x1.astype(int)
    else:
        first = nearest_rank_bins(x1, [0.5])
    second = nearest_rank_bins(x2, [0.25, 0.5, 0.75])
    return [StratumKey((int(a), int(b))) for a, b in zip(first, second)]


def spb_randomize(strata: Sequence[Hashable], block_size: int = 4, rng: SeedLike = 0) -> np.ndarray:
    """
    Permuted-block assignments within each stratum, subjects taken in arrival
    order. Every block is a random permutation of block_size/2 treated and
    block_size/2 control labels; a trailing partial block keeps a prefix.
    """
    if block_size < 2 or block_size % 2:
        raise ScenarioError(f"block size must be a positive even number, got {block_size}")
    rng = as_generator(rng)
    strata = list(strata)
    arms = np.empty(len(strata), dtype=int)
    balanced = np.repeat([0, 1], block_size // 2)
    members: Dict[Hashable, List[int]] = {}
    for position, key in enumerate(strata):
        members.setdefault(key, []).append(position)
    for key in sorted(members):
        positions = members[key]
        for start in range(0, len(positions), block_size):
            chunk = positions[start:start + block_size]
            arms[chunk] = rng.permutation(balanced)[: len(chunk)]
    return arms
