"""Exact i.i.d. sampling of subsets and empirical distributions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyBatch, WrongLength
from .powerset import EventSet, PowersetDistribution


@dataclass(frozen=True, eq=False)
class SampleBatch:
    eventset: EventSet
    draws: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        draws = np.asarray(self.draws, dtype=np.int64)
        if draws.ndim != 1:
            raise WrongLength("draws must be one-dimensional")
        if draws.size and (draws.min() < 0 or draws.max() >= self.eventset.size):
            raise WrongLength(f"draws must be masks below {self.eventset.size}")
        draws.setflags(write=False)
        object.__setattr__(self, "draws", draws)

    def __len__(self):
        return len(self.draws)


def sample(p: PowersetDistribution, count: int, seed: int) -> SampleBatch:
    """``count`` i.i.d. masks by inverse CDF over the table in mask order.

    Uniforms come from numpy's PCG64 seeded with ``seed``; a uniform ``u``
    maps to the first mask whose cumulative probability exceeds ``u``, so
    zero-probability masks are never drawn.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    cdf = np.cumsum(p.probs)
    cdf /= cdf[-1]
    u = np.random.default_rng(seed).random(count)
    draws = np.searchsorted(cdf, u, side="right")
    # u < 1 = cdf[-1] always, so draws < 2**n; guard against rounding anyway
    np.minimum(draws, int(np.flatnonzero(p.probs > 0)[-1]), out=draws)
    return SampleBatch(p.eventset, draws, seed)


def empirical_distribution(batch: SampleBatch) -> PowersetDistribution:
    if len(batch) == 0:
        raise EmptyBatch("cannot estimate a distribution from an empty batch")
    counts = np.bincount(batch.draws, minlength=batch.eventset.size)
    return PowersetDistribution(batch.eventset, counts / len(batch))
