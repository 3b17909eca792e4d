"""Direct minimization of relative entropy over the feasible polytope.

This deliberately does not use the exponential-tilt formula: it runs a
conditional-gradient (Frank-Wolfe) method on ``H(p|p*)`` over::

    {p >= 0, sum p = 1, sum p*V = target, supp p within supp p*}

whose vertices are single atoms with ``V(X) = target`` and two-atom mixtures
straddling the target. Agreement with the closed form is therefore a genuine
cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .entropy import relative_entropy
from .errors import TargetOutOfRange
from .powerset import PowersetDistribution, ValueFunction, check_same_eventset


@dataclass(frozen=True)
class OracleConfig:
    max_iters: int = 5000
    tol: float = 1e-8
    # None starts at the vertex barycentre; an integer draws a random
    # interior start (Dirichlet mixture of all vertices)
    seed: int | None = None
    record_trace: bool = False

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be > 0")


@dataclass(frozen=True, eq=False)
class OracleResult:
    distribution: PowersetDistribution
    entropy: float
    iterations: int
    gap: float
    converged: bool
    trace: tuple = field(default=(), repr=False)


class _Vertices:
    """Vertex set of the feasible polytope in index form.

    ``lo``/``hi`` are atoms with ``V`` below/above the target; the pair
    ``(lo[i], hi[j])`` carries weight ``w[i, j]`` on ``lo[i]`` and
    ``1 - w[i, j]`` on ``hi[j]``. ``eq`` atoms are vertices on their own.
    """

    def __init__(self, atoms, values, target):
        v = values[atoms]
        self.lo = atoms[v < target]
        self.hi = atoms[v > target]
        self.eq = atoms[v == target]
        vl = values[self.lo][:, None]
        vh = values[self.hi][None, :]
        self.w = np.ascontiguousarray((vh - target) / (vh - vl))

    @property
    def count(self) -> int:
        return self.lo.size * self.hi.size + self.eq.size

    def mixture(self, size, pair_weights, eq_weights):
        """Convex combination of the vertices; weights must sum to one."""
        p = np.zeros(size)
        np.add.at(p, self.lo, (pair_weights * self.w).sum(axis=1))
        np.add.at(p, self.hi, (pair_weights * (1.0 - self.w)).sum(axis=0))
        np.add.at(p, self.eq, eq_weights)
        return p

    def barycentre(self, size):
        k = self.count
        return self.mixture(size, np.full(self.w.shape, 1.0 / k), np.full(self.eq.size, 1.0 / k))

    def random_interior(self, size, seed):
        lam = np.random.default_rng(seed).dirichlet(np.ones(self.count))
        pairs = lam[:self.w.size].reshape(self.w.shape)
        return self.mixture(size, pairs, lam[self.w.size:])

    def scan(self, c):
        """``(argmin, min, argmax, max)`` of ``<c, vertex>``; vertices are
        returned as ``(atoms, weights)`` pairs."""
        best = worst = None
        if self.lo.size and self.hi.size:
            i0, j0, s0, i1, j1, s1 = kernels.pair_scan(
                np.ascontiguousarray(c[self.lo]), np.ascontiguousarray(c[self.hi]), self.w)
            best = (s0, (self.lo[i0], self.hi[j0]), (self.w[i0, j0], 1.0 - self.w[i0, j0]))
            worst = (s1, (self.lo[i1], self.hi[j1]), (self.w[i1, j1], 1.0 - self.w[i1, j1]))
        for x in self.eq:
            s = c[x]
            if best is None or s < best[0]:
                best = (s, (x,), (1.0,))
            if worst is None or s > worst[0]:
                worst = (s, (x,), (1.0,))
        return best, worst


def _check_target(atoms, values, target):
    v = values[atoms]
    if not v.min() <= target <= v.max():
        raise TargetOutOfRange(
            f"target {target!r} outside [{v.min()!r}, {v.max()!r}]")


def polytope_vertices(base_support, value: ValueFunction, target: float) -> list[PowersetDistribution]:
    """Every vertex of the feasible polytope as a distribution."""
    atoms = np.array(sorted(base_support), dtype=np.int64)
    values = value.values
    _check_target(atoms, values, target)
    vs = _Vertices(atoms, values, target)
    es = value.eventset
    out = []
    for x in vs.eq:
        p = np.zeros(es.size)
        p[x] = 1.0
        out.append(PowersetDistribution(es, p))
    for i, x in enumerate(vs.lo):
        for j, y in enumerate(vs.hi):
            p = np.zeros(es.size)
            p[x] = vs.w[i, j]
            p[y] = 1.0 - vs.w[i, j]
            out.append(PowersetDistribution(es, p))
    return out


def minimize_kl(base: PowersetDistribution, value: ValueFunction, target: float,
                config: OracleConfig = OracleConfig()) -> OracleResult:
    """Minimize ``H(p|p*)`` subject to ``sum p*V = target``.

    Starts at the barycentre of all vertices (or, with ``config.seed`` set,
    at a random mixture of all of them). Each iteration scans every
    vertex against the gradient ``ln(p/p*)`` (zero-mass atoms count as
    ``-inf``), then takes a pairwise step: mass moves from the worst vertex
    to the best one, with exact line search over the largest step keeping
    ``p >= 0``. The iterate stays in the relative interior, so the whole
    polytope is the active face and every vertex is a valid away vertex.
    Stops once the Frank-Wolfe gap ``<grad, p - best>`` is ``<= tol``;
    otherwise returns the last iterate with ``converged=False``.
    """
    check_same_eventset(base, value)
    target = float(target)
    ps = base.probs
    atoms = np.flatnonzero(ps > 0)
    values = value.values
    _check_target(atoms, values, target)
    v = values[atoms]
    if v.min() == v.max() or not v.min() < target < v.max():
        raise TargetOutOfRange(
            f"target {target!r} must lie strictly inside ({v.min()!r}, {v.max()!r})")

    vs = _Vertices(atoms, values, target)
    size = base.eventset.size
    if config.seed is None:
        p = vs.barycentre(size)
    else:
        p = vs.random_interior(size, config.seed)
    trace = []
    gap = math.inf
    it = 0
    for it in range(1, config.max_iters + 1):
        with np.errstate(divide="ignore"):
            c = np.where(ps > 0, np.log(p / np.where(ps > 0, ps, 1.0)), 0.0)
        if config.record_trace:
            trace.append(kernels.kl(p, ps))
        (s_best, x_best, w_best), (s_worst, x_worst, w_worst) = vs.scan(c)
        live = p > 0
        gap = float(p[live] @ c[live]) - s_best
        if gap <= config.tol:
            break
        if it == config.max_iters:
            break
        d = {}
        for x, w in zip(x_best, w_best):
            d[x] = d.get(x, 0.0) + w
        for x, w in zip(x_worst, w_worst):
            d[x] = d.get(x, 0.0) - w
        idx = np.array([x for x in d if d[x] != 0.0], dtype=np.int_)
        dv = np.array([d[x] for x in idx], dtype=np.float64)
        if idx.size == 0:
            break
        neg = dv < 0
        step_max = float(np.min(p[idx[neg]] / -dv[neg]))
        s = kernels.line_search(p, ps, idx, dv, step_max)
        if s <= 0.0:
            break
        p[idx] += s * dv
        np.maximum(p, 0.0, out=p)

    dist = PowersetDistribution(base.eventset, p)
    if config.record_trace:
        trace.append(kernels.kl(p, ps))
    return OracleResult(
        distribution=dist,
        entropy=relative_entropy(dist, base),
        iterations=it,
        gap=float(gap),
        converged=bool(gap <= config.tol),
        trace=tuple(trace),
    )
