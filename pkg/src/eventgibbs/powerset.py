"""Event sets, subset masks, value set-functions and powerset distributions.

A subset ``X`` of the event set is encoded as an integer bitmask: bit ``i``
is set when the ``i``-th event (in declaration order) belongs to ``X``. Every
table in this package is dense, of length ``2**n``, indexed by that mask.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EventSetMismatch,
    InvalidEventSet,
    NegativeProbability,
    NegativeValue,
    NonFiniteValue,
    NotNormalized,
    WrongLength,
)

MAX_EVENTS = 16
# internal invariant vs. accept-and-rescale window for incoming tables
SUM_TOL = 1e-12
RESCALE_TOL = 1e-9


@dataclass(frozen=True)
class EventSet:
    """Ordered, named, finite set of events."""

    names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if not 1 <= len(names) <= MAX_EVENTS:
            raise InvalidEventSet(
                f"need between 1 and {MAX_EVENTS} events, got {len(names)}")
        for name in names:
            if not isinstance(name, str) or not name:
                raise InvalidEventSet(f"event labels must be non-empty strings: {name!r}")
        if len(set(names)) != len(names):
            raise InvalidEventSet(f"duplicate event labels in {names}")

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def size(self) -> int:
        """Number of subsets, ``2**n``."""
        return 1 << len(self.names)

    def mask_of(self, events: Iterable[str]) -> int:
        index = {name: i for i, name in enumerate(self.names)}
        mask = 0
        for e in events:
            if e not in index:
                raise InvalidEventSet(f"unknown event {e!r}")
            mask |= 1 << index[e]
        return mask

    def events_of(self, mask: int) -> tuple[str, ...]:
        return tuple(name for i, name in enumerate(self.names) if mask >> i & 1)

    def bitstring(self, mask: int) -> str:
        """Leftmost character is the first event."""
        return "".join("1" if mask >> i & 1 else "0" for i in range(self.n))

    def parse_bitstring(self, bits: str) -> int:
        if len(bits) != self.n or set(bits) - {"0", "1"}:
            raise ValueError(f"bad bitstring {bits!r} for {self.n} events")
        return sum(1 << i for i, ch in enumerate(bits) if ch == "1")


def enumerate_subsets(eventset: EventSet) -> range:
    """All masks ``0 .. 2**n - 1`` in increasing order; the empty set first."""
    return range(eventset.size)


def _as_table(raw, eventset: EventSet, what: str) -> np.ndarray:
    table = np.array(raw, dtype=np.float64)
    if table.ndim != 1 or table.shape[0] != eventset.size:
        raise WrongLength(
            f"{what} table must have {eventset.size} entries, got shape {table.shape}")
    if not np.all(np.isfinite(table)):
        raise NonFiniteValue(f"{what} table has non-finite entries")
    table.setflags(write=False)
    return table


@dataclass(frozen=True, eq=False)
class ValueFunction:
    """Nonnegative, finite value set-function on all subsets."""

    eventset: EventSet
    values: np.ndarray

    def __post_init__(self):
        values = _as_table(self.values, self.eventset, "value")
        if np.any(values < 0):
            first = int(np.argmax(values < 0))
            raise NegativeValue(f"value of mask {first} is {values[first]!r} < 0")
        object.__setattr__(self, "values", values)

    def __getitem__(self, mask: int) -> float:
        return float(self.values[mask])

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True, eq=False)
class PowersetDistribution:
    """Probability table over all subsets.

    The constructor enforces the strict invariant (entries >= 0, sum within
    ``1e-12`` of one). Use :func:`validate_distribution` for tables coming
    from outside, which tolerates and repairs slightly larger rounding.
    """

    eventset: EventSet
    probs: np.ndarray

    def __post_init__(self):
        probs = _as_table(self.probs, self.eventset, "probability")
        if np.any(probs < 0):
            first = int(np.argmax(probs < 0))
            raise NegativeProbability(f"p(mask {first}) = {probs[first]!r} < 0")
        total = math.fsum(probs)
        if abs(total - 1.0) > SUM_TOL:
            raise NotNormalized(f"probabilities sum to {total!r}")
        object.__setattr__(self, "probs", probs)

    def __getitem__(self, mask: int) -> float:
        return float(self.probs[mask])

    def __len__(self):
        return len(self.probs)


def validate_distribution(probs: Sequence[float], eventset: EventSet) -> PowersetDistribution:
    """Check a raw table and return it as a :class:`PowersetDistribution`.

    A table whose sum is off by more than ``1e-9`` is rejected. Inside that
    window, a table that would break the internal ``1e-12`` invariant is
    divided by its sum; anything closer is kept bit-for-bit.
    """
    table = np.array(probs, dtype=np.float64)
    if table.ndim != 1 or table.shape[0] != eventset.size:
        raise WrongLength(
            f"probability table must have {eventset.size} entries, got shape {table.shape}")
    if not np.all(np.isfinite(table)):
        raise NonFiniteValue("probability table has non-finite entries")
    if np.any(table < 0):
        first = int(np.argmax(table < 0))
        raise NegativeProbability(f"p(mask {first}) = {table[first]!r} < 0")
    total = math.fsum(table)
    if abs(total - 1.0) > RESCALE_TOL:
        raise NotNormalized(f"probabilities sum to {total!r}")
    if abs(total - 1.0) > SUM_TOL:
        table = table / total
    return PowersetDistribution(eventset, table)


def check_same_eventset(*objs) -> EventSet:
    first = objs[0].eventset
    for obj in objs[1:]:
        if obj.eventset != first:
            raise EventSetMismatch(f"{first.names} vs {obj.eventset.names}")
    return first


def mean_value(p: PowersetDistribution, v) -> float:
    """Expectation of ``v`` under ``p``, with exactly rounded summation.

    ``v`` is a :class:`ValueFunction` or a raw table of ``2**n`` reals; the
    raw form skips the sign check (useful for signed linear combinations).
    """
    if isinstance(v, ValueFunction):
        check_same_eventset(p, v)
        values = v.values
    else:
        values = np.asarray(v, dtype=np.float64)
        if values.shape != p.probs.shape:
            raise WrongLength(f"value table shape {values.shape} != {p.probs.shape}")
    return math.fsum(p.probs * values)


def support(p: PowersetDistribution) -> frozenset[int]:
    return frozenset(int(i) for i in np.flatnonzero(p.probs > 0))


def uniform(eventset: EventSet) -> PowersetDistribution:
    return PowersetDistribution(eventset, np.full(eventset.size, 1.0 / eventset.size))


def default_eventset(n: int) -> EventSet:
    """Events named ``x1 .. xn``."""
    return EventSet(tuple(f"x{i + 1}" for i in range(n)))
