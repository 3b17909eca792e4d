import math

import numpy as np
import pytest

from eventgibbs import (
    EventSet,
    OracleConfig,
    PowersetDistribution,
    TargetOutOfRange,
    ValueFunction,
    attainable_mean_range,
    default_eventset,
    gibbs_distribution,
    mean_value,
    minimize_kl,
    polytope_vertices,
    relative_entropy,
    solve_alpha_for_mean,
    support,
    uniform,
)
from helpers import doublet, monoplet, random_instance

DOUBLET_P = (0.64391425988797231, 0.23688281808991013, 0.087144318742032567, 0.032058603280084988)


def brute_vertices(atoms, v, t):
    """Vertices by definition: basic feasible solutions with one or two atoms."""
    out = set()
    for x in atoms:
        if v[x] == t:
            out.add(((x, 1.0),))
    for x in atoms:
        for y in atoms:
            if v[x] < t < v[y]:
                w = float((v[y] - t) / (v[y] - v[x]))
                out.add(tuple(sorted([(x, round(w, 12)), (y, round(1 - w, 12))])))
    return out


def as_key(p):
    nz = np.flatnonzero(p.probs)
    return tuple((int(i), round(float(p.probs[i]), 12)) for i in nz)


def test_vertices_monoplet():
    base, v = monoplet()
    vs = polytope_vertices(support(base), v, 1 / 3)
    assert len(vs) == 1
    assert np.allclose(vs[0].probs, [2 / 3, 1 / 3], atol=1e-15)


def test_vertices_doublet_target_one():
    base, v = doublet()
    keys = {as_key(p) for p in polytope_vertices(support(base), v, 1.0)}
    assert ((1, 1.0),) in keys
    assert ((0, 0.5), (2, 0.5)) in keys
    assert ((0, round(2 / 3, 12)), (3, round(1 / 3, 12))) in keys
    assert len(keys) == 3
    with pytest.raises(TargetOutOfRange):
        polytope_vertices(support(base), v, 3.5)


def test_vertices_vs_brute_force(rng):
    for _ in range(30):
        n = int(rng.integers(1, 5))
        es = default_eventset(n)
        v = ValueFunction(es, rng.integers(0, 4, es.size).astype(float))
        atoms = sorted(rng.choice(es.size, size=max(1, es.size // 2 + 1), replace=False).tolist())
        lo, hi = v.values[atoms].min(), v.values[atoms].max()
        t = float(rng.choice([lo, hi, 0.5 * (lo + hi), v.values[atoms[0]]]))
        vs = polytope_vertices(set(atoms), v, t)
        m = len(atoms)
        assert len(vs) <= m * (m - 1) // 2 + m
        for p in vs:
            assert abs(math.fsum(p.probs) - 1) <= 1e-12
            assert abs(mean_value(p, v) - t) <= 1e-12
        assert {as_key(p) for p in vs} == brute_vertices(atoms, v.values, t)


def test_oracle_monoplet_single_iteration():
    base, v = monoplet()
    res = minimize_kl(base, v, 1 / 3)
    assert res.iterations == 1 and res.converged
    assert np.allclose(res.distribution.probs, [2 / 3, 1 / 3], atol=1e-15)


def test_oracle_doublet_matches_closed_form():
    base, v = doublet()
    res = minimize_kl(base, v, 0.507348)
    assert res.converged
    assert np.max(np.abs(res.distribution.probs - DOUBLET_P)) <= 1e-5


def test_oracle_n6_random():
    rng = np.random.default_rng(6)
    base, v = random_instance(rng, 6)
    t = attainable_mean_range(base, v).midpoint
    res = minimize_kl(base, v, t, OracleConfig(max_iters=50000))
    h = relative_entropy(gibbs_distribution(solve_alpha_for_mean(base, v, t, 1e-13)), base)
    assert res.converged
    assert abs(res.entropy - h) <= 1e-6
    assert res.entropy >= h - 1e-10 and res.entropy <= h + 1e-5


def test_oracle_trace_feasible_and_monotone():
    rng = np.random.default_rng(2)
    base, v = random_instance(rng, 4)
    t = attainable_mean_range(base, v).midpoint
    res = minimize_kl(base, v, t, OracleConfig(record_trace=True, max_iters=300))
    trace = np.array(res.trace)
    assert np.all(np.diff(trace) <= 1e-12)
    p = res.distribution.probs
    assert abs(math.fsum(p) - 1) <= 1e-12
    assert abs(mean_value(res.distribution, v) - t) <= 1e-9
    assert p.min() >= -1e-15


def test_oracle_random_start():
    rng = np.random.default_rng(8)
    base, v = random_instance(rng, 4)
    t = attainable_mean_range(base, v).midpoint
    a = minimize_kl(base, v, t, OracleConfig(seed=1))
    b = minimize_kl(base, v, t, OracleConfig(seed=1))
    c = minimize_kl(base, v, t)
    assert np.array_equal(a.distribution.probs, b.distribution.probs)
    assert abs(a.entropy - c.entropy) <= 1e-8


def test_oracle_reports_non_convergence():
    rng = np.random.default_rng(4)
    base, v = random_instance(rng, 6)
    t = attainable_mean_range(base, v).midpoint
    res = minimize_kl(base, v, t, OracleConfig(max_iters=3))
    assert not res.converged and res.iterations == 3 and res.gap > 1e-8


def test_oracle_zero_base_atoms():
    es = default_eventset(3)
    base = PowersetDistribution(es, [0.2, 0, 0.3, 0, 0.1, 0.2, 0, 0.2])
    v = ValueFunction(es, [0, 1, 2, 3, 4, 5, 6, 7])
    t = 3.3
    res = minimize_kl(base, v, t, OracleConfig(max_iters=20000, tol=1e-10))
    g = gibbs_distribution(solve_alpha_for_mean(base, v, t, 1e-13))
    assert support(res.distribution) == support(base)
    assert np.max(np.abs(res.distribution.probs - g.probs)) <= 1e-5


def test_oracle_rejects_boundary_targets():
    base, v = doublet()
    for t in (0.0, 3.0, 4.0):
        with pytest.raises(TargetOutOfRange):
            minimize_kl(base, v, t)
