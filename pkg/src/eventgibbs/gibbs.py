"""Gibbs and anti-Gibbs families on a powerset.

Internally one signed tilt ``alpha`` covers both families::

    p_alpha(X) = exp(alpha * V(X)) * p*(X) / Z,   Z = sum_X exp(alpha * V(X)) * p*(X)

``alpha = -beta <= 0`` is the Gibbs (perception) member and
``alpha = +gamma >= 0`` the anti-Gibbs (activity) member.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .errors import (
    DegenerateMismatch,
    EmptySetExcluded,
    NegativeRate,
    NumericalError,
    TargetOutOfRange,
)
from .powerset import (
    PowersetDistribution,
    ValueFunction,
    check_same_eventset,
)


class Direction(enum.Enum):
    PERCEPTION_GIBBS = "gibbs"
    ACTIVITY_ANTI_GIBBS = "anti-gibbs"


def alpha_from_rate(direction: Direction, rate: float) -> float:
    """Signed tilt for a Gibbs rate ``beta`` or anti-Gibbs rate ``gamma``."""
    if not rate >= 0:
        raise NegativeRate(f"rate must be >= 0, got {rate!r}")
    if direction is Direction.PERCEPTION_GIBBS:
        return -float(rate)
    return float(rate)


@dataclass(frozen=True, eq=False)
class GibbsModel:
    """Base distribution, value function and signed tilt.

    The tilted table, ``log_z`` and the first two moments of the value
    function are computed once at construction.
    """

    base: PowersetDistribution
    value: ValueFunction
    alpha: float
    log_z: float = field(init=False)
    mean: float = field(init=False)
    variance: float = field(init=False)
    _probs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        check_same_eventset(self.base, self.value)
        alpha = float(self.alpha)
        if not math.isfinite(alpha):
            raise NumericalError(f"tilt must be finite, got {alpha!r}")
        out = np.empty_like(self.base.probs)
        log_z, mean, var = kernels.tilt(self.value.values, self.base.probs, alpha, out)
        if not math.isfinite(log_z):
            raise NumericalError(f"log-partition is not finite at alpha={alpha!r}")
        out.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "log_z", log_z)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "variance", max(var, 0.0))
        object.__setattr__(self, "_probs", out)

    @classmethod
    def from_rate(cls, base, value, direction: Direction, rate: float) -> "GibbsModel":
        return cls(base, value, alpha_from_rate(direction, rate))

    @property
    def eventset(self):
        return self.base.eventset

    @property
    def beta(self) -> float:
        return max(-self.alpha, 0.0)

    @property
    def gamma(self) -> float:
        return max(self.alpha, 0.0)

    @property
    def direction(self) -> Direction:
        if self.alpha <= 0:
            return Direction.PERCEPTION_GIBBS
        return Direction.ACTIVITY_ANTI_GIBBS


def gibbs_distribution(model: GibbsModel) -> PowersetDistribution:
    """The normalized member ``p_alpha`` of the family."""
    return PowersetDistribution(model.eventset, model._probs)


def ratio_form(model: GibbsModel, x: int) -> float:
    """``p(X)/p(empty)`` without the partition function."""
    ps = model.base.probs
    if not ps[0] > 0:
        raise EmptySetExcluded("p*(empty) = 0, ratio form undefined")
    v = model.value.values
    return math.exp(model.alpha * (v[x] - v[0])) * ps[x] / ps[0]


def gibbs_factor(value: ValueFunction, direction: Direction, rate: float, x: int) -> float:
    """Unnormalized factor ``exp(-beta V(X))`` or anti-factor ``exp(gamma V(X))``."""
    return math.exp(alpha_from_rate(direction, rate) * value.values[x])


@dataclass(frozen=True)
class MeanRange:
    """Range of ``V`` over the support of the base distribution.

    Targets are attainable on the open interval ``(lo, hi)``; when the range
    is degenerate (``lo == hi``) only that single point is.
    """

    lo: float
    hi: float

    @property
    def degenerate(self) -> bool:
        return self.lo == self.hi

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, target: float) -> bool:
        if self.degenerate:
            return target == self.lo
        return self.lo < target < self.hi


def attainable_mean_range(base: PowersetDistribution, value: ValueFunction) -> MeanRange:
    check_same_eventset(base, value)
    v = value.values[base.probs > 0]
    return MeanRange(float(v.min()), float(v.max()))


def mean_alpha_derivative(model: GibbsModel) -> float:
    """``d mean / d alpha``, which is the variance of ``V`` under ``p_alpha``."""
    return model.variance


def solve_alpha_for_mean(base: PowersetDistribution, value: ValueFunction,
                         target: float, tol: float = 1e-12) -> GibbsModel:
    """Family member whose mean of ``V`` equals ``target`` within ``tol``.

    The mean is nondecreasing in ``alpha``. The root is bracketed by doubling
    away from zero, then refined with Newton steps (the slope is the
    variance) that fall back to bisection whenever they leave the bracket.
    """
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol!r}")
    target = float(target)
    rng = attainable_mean_range(base, value)
    if rng.degenerate:
        if target != rng.lo:
            raise DegenerateMismatch(
                f"V is constant {rng.lo!r} on the support; target {target!r} unreachable")
        return GibbsModel(base, value, 0.0)
    if not rng.lo < target < rng.hi:
        raise TargetOutOfRange(
            f"target {target!r} outside the open range ({rng.lo!r}, {rng.hi!r})")

    model = GibbsModel(base, value, 0.0)
    f0 = model.mean - target
    if abs(f0) <= tol:
        return model

    # bracket [a, b] with f(a) < 0 < f(b)
    sign = 1.0 if f0 < 0 else -1.0
    step = 1.0
    inner = model
    for _ in range(1100):
        outer = GibbsModel(base, value, sign * step)
        f = outer.mean - target
        if abs(f) <= tol:
            return outer
        if (f > 0) == (sign > 0):
            break
        inner = outer
        step *= 2.0
    else:
        raise NumericalError("could not bracket the target mean")
    lo_m, hi_m = (inner, outer) if sign > 0 else (outer, inner)

    best = min((lo_m, hi_m), key=lambda m: abs(m.mean - target))
    current = best
    force_bisect = False
    width = hi_m.alpha - lo_m.alpha
    for _ in range(400):
        a, b = lo_m.alpha, hi_m.alpha
        guess = None
        if current.variance > 0 and not force_bisect:
            guess = current.alpha - (current.mean - target) / current.variance
        if guess is None or not a < guess < b:
            guess = 0.5 * (a + b)
        if not a < guess < b:
            break
        current = GibbsModel(base, value, guess)
        f = current.mean - target
        if abs(f) < abs(best.mean - target):
            best = current
        if abs(f) <= tol:
            return current
        if f < 0:
            lo_m = current
        else:
            hi_m = current
        new_width = hi_m.alpha - lo_m.alpha
        force_bisect = new_width > 0.5 * width
        width = new_width
    if abs(best.mean - target) <= tol:
        return best
    raise NumericalError(
        f"mean {best.mean!r} at alpha={best.alpha!r} misses target {target!r} "
        f"by more than tol={tol!r}; the bracket collapsed to floating resolution")
