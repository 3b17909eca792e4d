"""Relative entropy, the value/entropy identities of the tilted family, and a
sampling-based certificate that the tilted member minimizes relative entropy
among all distributions with the same mean of ``V``.

All entropies are in nats.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .errors import (
    EmptySetExcluded,
    OutOfSupport,
    ResampleBudgetExhausted,
    TargetOutOfRange,
    ZeroAlpha,
)
from .gibbs import (
    GibbsModel,
    attainable_mean_range,
    gibbs_distribution,
    solve_alpha_for_mean,
)
from .powerset import (
    PowersetDistribution,
    ValueFunction,
    check_same_eventset,
    validate_distribution,
)

GAP_TOL = 1e-10
DECOMPOSITION_TOL = 1e-9
MEAN_TOL = 1e-10
THREADS_ENV = "EVENTGIBBS_THREADS"


def relative_entropy(p: PowersetDistribution, q: PowersetDistribution) -> float:
    """``H(p|q) = sum p ln(p/q)``, with ``0 ln 0 = 0``; ``math.inf`` when
    ``p`` puts mass where ``q`` has none."""
    check_same_eventset(p, q)
    return kernels.kl(p.probs, q.probs)


def xlogx_excess(g):
    """``g ln g - g + 1``, elementwise; nonnegative, zero only at ``g = 1``.

    Evaluated as ``g*log1p(g-1) - (g-1)`` to keep accuracy near one; ``g = 0``
    gives 1.
    """
    g = np.asarray(g, dtype=np.float64)
    out = np.ones_like(g)
    nz = g > 0
    gm1 = g[nz] - 1.0
    out[nz] = g[nz] * np.log1p(gm1) - gm1
    return out


def decomposition_sum(q: PowersetDistribution, p: PowersetDistribution) -> float:
    """``sum p * (g ln g - g + 1)`` with ``g = q/p`` on the support of ``p``.

    When ``p`` is the tilted member and ``q`` shares its mean of ``V`` and its
    support, this equals ``H(q|p*) - H(p|p*)``.
    """
    check_same_eventset(p, q)
    return kernels.decomposition(q.probs, p.probs)


def _identity_preconditions(model: GibbsModel):
    if model.alpha == 0:
        raise ZeroAlpha("identities divide by the tilt; alpha = 0 is excluded")
    if not model.base.probs[0] > 0:
        raise EmptySetExcluded("p*(empty) = 0")


def pointwise_value_identity_residual(model: GibbsModel, x: int) -> float:
    """Residual of recovering ``V(X)`` from the tilted and base tables::

        V(X) - [ ln(p(X)/p*(X))/alpha + ln(p*(0)/p(0))/alpha + V(0) ]

    With ``alpha = -beta`` this is the Gibbs form, with ``alpha = gamma`` the
    anti-Gibbs form. Zero up to rounding for every ``X`` in the support.
    """
    _identity_preconditions(model)
    ps = model.base.probs
    if not ps[x] > 0:
        raise OutOfSupport(f"mask {x} is outside the support of p*")
    if x == 0:
        return 0.0
    p = model._probs
    v = model.value.values
    a = model.alpha
    recovered = math.log(p[x] / ps[x]) / a + math.log(ps[0] / p[0]) / a + v[0]
    return float(v[x] - recovered)


def max_pointwise_residual(model: GibbsModel) -> float:
    """Largest absolute pointwise residual over the support."""
    _identity_preconditions(model)
    atoms = np.flatnonzero(model.base.probs > 0)
    return max(abs(pointwise_value_identity_residual(model, int(x))) for x in atoms)


@dataclass(frozen=True)
class MeanEntropyRelation:
    mean: float
    relative_entropy: float
    empty_set_term: float
    reconstructed_mean: float

    @property
    def residual(self) -> float:
        return self.reconstructed_mean - self.mean


def mean_entropy_relation(model: GibbsModel) -> MeanEntropyRelation:
    """Average the pointwise identity over ``p_alpha``::

        <V> = H(p_alpha|p*)/alpha + ln(p*(0)/p_alpha(0))/alpha + V(0)

    i.e. ``-(H + ln(...))/beta + V(0)`` for Gibbs and
    ``+(H + ln(...))/gamma + V(0)`` for anti-Gibbs.
    """
    _identity_preconditions(model)
    p = gibbs_distribution(model)
    h = relative_entropy(p, model.base)
    empty = math.log(model.base.probs[0] / p.probs[0])
    a = model.alpha
    rebuilt = h / a + empty / a + float(model.value.values[0])
    return MeanEntropyRelation(model.mean, h, empty, rebuilt)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream for one trial: PCG64 seeded by
    ``SeedSequence([seed, trial])``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial)]))


class FeasibleSampler:
    """Random distributions on ``support(p*)`` whose mean of ``V`` is ``target``.

    Each draw picks, with probability 1/2, one of two constructions:

    * mixture: two softmax-of-Gaussian distributions whose means straddle the
      target, mixed so the mean is exactly the target;
    * null-space: the tilted member moved along a random direction that
      preserves both total mass and mean, by a uniform fraction of the
      largest step keeping every entry nonnegative.

    With two support atoms and a non-constant ``V`` the feasible set is a
    single point and every draw returns it.
    """

    def __init__(self, base: PowersetDistribution, value: ValueFunction,
                 target: float, seed: int = 0, max_resamples: int = 10000,
                 gibbs: GibbsModel | None = None):
        check_same_eventset(base, value)
        self.base = base
        self.value = value
        self.target = float(target)
        self.seed = int(seed)
        self.max_resamples = int(max_resamples)
        self.range = attainable_mean_range(base, value)
        self._atoms = np.flatnonzero(base.probs > 0)
        self._v = value.values[self._atoms]
        self._gibbs = gibbs
        self._basis = None

    @property
    def dimension(self) -> int:
        """Dimension of the feasible polytope."""
        rank = 1 if self.range.degenerate else 2
        return max(len(self._atoms) - rank, 0)

    def gibbs_point(self) -> GibbsModel | None:
        if self._gibbs is None and self.range.contains(self.target):
            self._gibbs = solve_alpha_for_mean(self.base, self.value, self.target, tol=1e-13)
        return self._gibbs

    def _embed(self, q_atoms) -> PowersetDistribution:
        full = np.zeros(self.base.eventset.size)
        full[self._atoms] = q_atoms
        return validate_distribution(full, self.base.eventset)

    def _unique_point(self):
        lo_i, hi_i = np.argmin(self._v), np.argmax(self._v)
        vlo, vhi = self._v[lo_i], self._v[hi_i]
        q = np.zeros(len(self._atoms))
        w = (vhi - self.target) / (vhi - vlo)
        q[lo_i] = w
        q[hi_i] = 1.0 - w
        return q

    def _softmax(self, rng):
        scale = math.exp(rng.uniform(-1.0, 1.5))
        z = scale * rng.standard_normal(len(self._atoms))
        w = np.exp(z - z.max())
        return w / w.sum()

    def _mixture(self, rng):
        t = self.target
        for _ in range(self.max_resamples):
            q1 = self._softmax(rng)
            q2 = self._softmax(rng)
            m1 = math.fsum(q1 * self._v)
            m2 = math.fsum(q2 * self._v)
            if m1 > m2:
                q1, q2, m1, m2 = q2, q1, m2, m1
            if m1 < t < m2:
                w = (m2 - t) / (m2 - m1)
                return w * q1 + (1.0 - w) * q2
        raise ResampleBudgetExhausted(
            f"no straddling pair around target {t!r} in {self.max_resamples} draws")

    def _null_space(self, rng, gibbs: GibbsModel):
        if self._basis is None:
            cons = np.stack([np.ones(len(self._atoms)), self._v - self._v.mean()], axis=1)
            qmat, _ = np.linalg.qr(cons)
            self._basis = qmat
        p = gibbs._probs[self._atoms]
        z = rng.standard_normal(len(self._atoms))
        d = z - self._basis @ (self._basis.T @ z)
        neg = d < 0
        if not np.any(neg):
            return p.copy()
        smax = float(np.min(p[neg] / -d[neg]))
        q = p + rng.uniform() * smax * d
        return np.clip(q, 0.0, None)

    def draw(self, rng: np.random.Generator) -> PowersetDistribution:
        if self.range.degenerate:
            if self.target != self.range.lo:
                raise TargetOutOfRange(f"V is constant {self.range.lo!r} on the support")
            return self._embed(self._softmax(rng))
        if self.dimension == 0 and self.range.contains(self.target):
            return self._embed(self._unique_point())
        use_null_space = rng.uniform() < 0.5
        gibbs = self.gibbs_point() if use_null_space else None
        if gibbs is not None:
            return self._embed(self._null_space(rng, gibbs))
        return self._embed(self._mixture(rng))

    def draws(self, count: int) -> list[PowersetDistribution]:
        """``count`` draws, draw ``i`` using :func:`trial_rng(seed, i)`."""
        return [self.draw(trial_rng(self.seed, i)) for i in range(count)]


def sample_feasible(sampler: FeasibleSampler, rng: np.random.Generator | None = None) -> PowersetDistribution:
    """One feasible distribution; without ``rng`` the sampler's seed is used
    directly, so repeated calls return the same draw."""
    if rng is None:
        rng = np.random.default_rng(sampler.seed)
    return sampler.draw(rng)


@dataclass(frozen=True)
class VerificationReport:
    trials: int
    alpha: float
    gibbs_entropy: float
    min_competitor_entropy: float
    worst_gap: float
    max_decomposition_residual: float
    gaps: tuple = field(repr=False)
    residuals: tuple = field(repr=False)

    @property
    def passed(self) -> bool:
        return self.worst_gap >= -GAP_TOL

    @property
    def decomposition_ok(self) -> bool:
        return self.max_decomposition_residual <= DECOMPOSITION_TOL

    def summary(self) -> str:
        return "\n".join([
            f"trials={self.trials}",
            f"alpha={self.alpha!r}",
            f"gibbs_entropy={self.gibbs_entropy!r}",
            f"min_competitor_entropy={self.min_competitor_entropy!r}",
            f"worst_gap={self.worst_gap!r}",
            f"max_decomposition_residual={self.max_decomposition_residual!r}",
            f"passed={str(self.passed).lower()}",
        ])


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def verify_h_theorem(base: PowersetDistribution, value: ValueFunction, target: float,
                     trials: int = 1000, seed: int = 0, *, extra_candidates=(),
                     max_resamples: int = 10000, workers: int | None = None,
                     solver_tol: float = 1e-13) -> VerificationReport:
    """Certify that the tilted member with mean ``target`` minimizes ``H(.|p*)``.

    Solves for ``alpha``, then for ``trials`` feasible competitors ``q`` (trial
    ``i`` drawn from :func:`trial_rng(seed, i)`) records the gap
    ``H(q|p*) - H(p_alpha|p*)`` and the residual of that gap against
    :func:`decomposition_sum`. ``extra_candidates`` are appended as further
    trials. Results do not depend on ``workers``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    model = solve_alpha_for_mean(base, value, target, tol=solver_tol)
    p = gibbs_distribution(model)
    h_star = relative_entropy(p, base)
    sampler = FeasibleSampler(base, value, target, seed, max_resamples, gibbs=model)

    def one(q: PowersetDistribution):
        h = relative_entropy(q, base)
        gap = h - h_star
        return h, gap, abs(gap - decomposition_sum(q, p))

    def trial(i: int):
        return one(sampler.draw(trial_rng(seed, i)))

    workers = workers or _default_workers()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(trial, range(trials)))
    else:
        results = [trial(i) for i in range(trials)]
    results += [one(q) for q in extra_candidates]

    hs, gaps, res = (np.array(col) for col in zip(*results))
    return VerificationReport(
        trials=len(results),
        alpha=model.alpha,
        gibbs_entropy=h_star,
        min_competitor_entropy=float(hs.min()),
        worst_gap=float(gaps.min()),
        max_decomposition_residual=float(res.max()),
        gaps=tuple(gaps.tolist()),
        residuals=tuple(res.tolist()),
    )
