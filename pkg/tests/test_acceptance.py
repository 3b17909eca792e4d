"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the verdict lines are written
straight to the terminal even when output capture is on.
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from eventgibbs import (
    Direction,
    GibbsModel,
    PowersetDistribution,
    ValueFunction,
    attainable_mean_range,
    default_eventset,
    empirical_distribution,
    gibbs_distribution,
    max_pointwise_residual,
    mean_entropy_relation,
    relative_entropy,
    sample,
    solve_alpha_for_mean,
    support,
    verify_h_theorem,
    xlogx_excess,
)
from eventgibbs.cli import main
from eventgibbs.formats import Model, emit_dist, emit_model, parse_dist, parse_model
from eventgibbs.oracle import OracleConfig, minimize_kl
from helpers import LN2, monoplet, random_instance

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def verdict(capsys):
    def report(number, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
        assert ok, detail
    return report


def test_criterion_1_certification(verdict):
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst = math.inf
    failures = 0
    for k in range(50):
        base, v = random_instance(rng, 2 + k % 7)
        target = attainable_mean_range(base, v).midpoint
        rep = verify_h_theorem(base, v, target, trials=1000, seed=k)
        worst = min(worst, rep.worst_gap)
        failures += not rep.passed
    elapsed = time.perf_counter() - start
    ok = failures == 0 and worst >= -1e-10 and elapsed < 30
    verdict(1, ok, f"50 instances x 1000 trials, worst_gap={worst:.3e}, "
                   f"failed={failures}, {elapsed:.1f}s (limit 30s)")


def test_criterion_2_oracle(verdict):
    rng = np.random.default_rng(2)
    cfg = OracleConfig(max_iters=50000, tol=1e-10)
    start = time.perf_counter()
    max_dh = max_linf = 0.0
    unconverged = 0
    for k in range(100):
        base, v = random_instance(rng, 2 + k % 7)
        r = attainable_mean_range(base, v)
        target = r.lo + rng.uniform(0.1, 0.9) * (r.hi - r.lo)
        res = minimize_kl(base, v, target, cfg)
        p = gibbs_distribution(solve_alpha_for_mean(base, v, target, tol=1e-13))
        max_dh = max(max_dh, abs(res.entropy - relative_entropy(p, base)))
        max_linf = max(max_linf, float(np.max(np.abs(res.distribution.probs - p.probs))))
        unconverged += not res.converged
    elapsed = time.perf_counter() - start
    ok = max_dh <= 1e-6 and max_linf <= 1e-4 and elapsed < 60
    verdict(2, ok, f"100 instances, max|dH|={max_dh:.3e}, max Linf={max_linf:.3e}, "
                   f"unconverged={unconverged}, {elapsed:.1f}s (limit 60s)")


def test_criterion_3_monoplet(verdict):
    base, v = monoplet()
    m = GibbsModel.from_rate(base, v, Direction.PERCEPTION_GIBBS, LN2)
    p = gibbs_distribution(m)
    err_p = float(np.max(np.abs(p.probs - [2 / 3, 1 / 3])))
    h = relative_entropy(p, base)
    solved = solve_alpha_for_mean(base, v, 1 / 3, tol=1e-12)
    ok = err_p <= 1e-12 and abs(h - 0.0566330) <= 1e-6 and abs(solved.beta - LN2) <= 1e-8
    verdict(3, ok, f"|p-(2/3,1/3)|={err_p:.1e}, KL={h:.7f}, "
                   f"solved beta-ln2={solved.beta - LN2:.1e}")


def test_criterion_4_decomposition(verdict):
    rng = np.random.default_rng(4)
    worst = 0.0
    count = 0
    for k in range(50):
        base, v = random_instance(rng, 2 + k % 7)
        target = attainable_mean_range(base, v).midpoint
        rep = verify_h_theorem(base, v, target, trials=200, seed=100 + k)
        worst = max(worst, rep.max_decomposition_residual)
        count += rep.trials
    grid = np.linspace(100.0 / 10 ** 6, 100.0, 10 ** 6)
    h = xlogx_excess(grid)
    grid_ok = bool(np.all(h >= 0)) and grid.size == 10 ** 6
    ok = worst <= 1e-9 and grid_ok
    verdict(4, ok, f"{count} trials, max residual={worst:.3e}; "
                   f"grid min of g ln g - g + 1 = {h.min():.3e}")


def test_criterion_5_identities(verdict):
    rng = np.random.default_rng(5)
    worst_point = worst_mean = 0.0
    for k in range(100):
        base, v = random_instance(rng, 1 + k % 8)
        for direction in Direction:
            m = GibbsModel.from_rate(base, v, direction, rng.uniform(0.05, 5.0))
            worst_point = max(worst_point, max_pointwise_residual(m))
            worst_mean = max(worst_mean, abs(mean_entropy_relation(m).residual))
    ok = worst_point <= 1e-9 and worst_mean <= 1e-9
    verdict(5, ok, f"100 instances x 2 directions, pointwise={worst_point:.3e}, "
                   f"averaged relation={worst_mean:.3e}")


def test_criterion_6_invariants(verdict):
    rng = np.random.default_rng(6)
    failures = []
    cases = 100

    for _ in range(cases):
        base, v = random_instance(rng, int(rng.integers(1, 9)))
        if not np.array_equal(gibbs_distribution(GibbsModel(base, v, 0.0)).probs, base.probs):
            failures.append("identity")

    for _ in range(cases):
        es = default_eventset(int(rng.integers(1, 7)))
        w = rng.uniform(0, 1, es.size) * (rng.uniform(size=es.size) < 0.6)
        w[0] = 1.0
        base = PowersetDistribution(es, w / w.sum())
        v = ValueFunction(es, rng.uniform(0, 5, es.size))
        a = rng.uniform(-40, 40)
        if support(gibbs_distribution(GibbsModel(base, v, a))) != support(base):
            failures.append("support")

    for _ in range(cases):
        # values on a 1/256 grid so that V + 1e6 is exact
        base, _ = random_instance(rng, int(rng.integers(1, 7)))
        raw = rng.integers(0, 5 * 256, base.eventset.size) / 256.0
        a = rng.uniform(-3, 3)
        m0 = GibbsModel(base, ValueFunction(base.eventset, raw), a)
        m1 = GibbsModel(base, ValueFunction(base.eventset, raw + 1e6), a)
        p1 = gibbs_distribution(m1).probs
        if not (np.all(np.isfinite(p1)) and math.isfinite(m1.log_z)
                and np.max(np.abs(gibbs_distribution(m0).probs - p1)) <= 1e-12):
            failures.append("shift")

    for _ in range(cases):
        base, v = random_instance(rng, int(rng.integers(1, 7)))
        s, a = rng.uniform(0.01, 10), rng.uniform(-5, 5)
        lhs = gibbs_distribution(GibbsModel(base, ValueFunction(base.eventset, s * v.values), a))
        rhs = gibbs_distribution(GibbsModel(base, v, a * s))
        if np.max(np.abs(lhs.probs - rhs.probs)) > 1e-12:
            failures.append("scale")

    for _ in range(cases):
        base, v = random_instance(rng, int(rng.integers(1, 7)))
        a1, a2 = np.sort(rng.uniform(-10, 10, 2))
        if not GibbsModel(base, v, a1).mean < GibbsModel(base, v, a2).mean:
            failures.append("monotone")

    worst_rt = 0.0
    for k in range(cases):
        # |alpha| * range(V) <= 15 keeps the mean map invertible to 1e-8 at |alpha| = 50
        es = default_eventset(int(rng.integers(1, 7)))
        w = rng.uniform(0.05, 1.0, es.size)
        base = PowersetDistribution(es, w / w.sum())
        v = ValueFunction(es, rng.uniform(0, 0.3, es.size))
        a = -50.0 + 100.0 * k / (cases - 1)
        got = solve_alpha_for_mean(base, v, GibbsModel(base, v, a).mean, tol=1e-15).alpha
        worst_rt = max(worst_rt, abs(got - a))
    if worst_rt > 1e-8:
        failures.append("round-trip")

    verdict(6, not failures, f"6 invariants x {cases} cases, failures={sorted(set(failures))}, "
                             f"round-trip max|da|={worst_rt:.1e}")


def test_criterion_7_sampling(verdict):
    rng = np.random.default_rng(7)
    draws = 10 ** 5
    within = 0
    for run in range(100):
        n = 1 + run % 4
        es = default_eventset(n)
        w = rng.uniform(0.05, 1.0, es.size)
        truth = PowersetDistribution(es, w / w.sum())
        emp = empirical_distribution(sample(truth, draws, seed=run))
        bound = 50 * (2 ** n - 1) / (2 * draws)
        within += relative_entropy(emp, truth) <= bound
    verdict(7, within >= 95, f"{within}/100 runs within 50(2^n-1)/(2N), N={draws}")


def test_criterion_8_formats_and_cli(verdict, capsys, monkeypatch, tmp_path):
    problems = []
    rng = np.random.default_rng(8)
    for _ in range(50):
        base, v = random_instance(rng, int(rng.integers(1, 7)))
        text = emit_model(Model(base.eventset, v, base))
        back = parse_model(text)
        if not (np.array_equal(back.value.values, v.values)
                and np.array_equal(back.base.probs, base.probs)
                and emit_model(back) == text):
            problems.append("model round trip")
        dtext = emit_dist(base, {"alpha": rng.normal()})
        if not np.array_equal(parse_dist(dtext).distribution.probs, base.probs):
            problems.append("dist round trip")

    bad = sorted((FIXTURES / "bad").glob("*.evt"))
    for path in bad:
        code = main(["verify", "--model", str(path), "--target-mean", "0.5", "--trials", "5"])
        err = capsys.readouterr().err
        if code != 1 or "line " not in err or "column " not in err:
            problems.append(f"fixture {path.name}")

    doublet = str(FIXTURES / "doublet.evt")
    code = main(["verify", "--model", doublet, "--target-mean", "0.5", "--trials", "1000", "--seed", "42"])
    if code != 0 or "passed=true" not in capsys.readouterr().out:
        problems.append("verify pass exit")

    from eventgibbs import cli
    real = cli.verify_h_theorem

    def tampered(*args, **kwargs):
        rep = real(*args, **kwargs)
        gaps = rep.gaps[:-1] + (-1e-3,)
        return type(rep)(rep.trials, rep.alpha, rep.gibbs_entropy, rep.gibbs_entropy - 1e-3,
                         -1e-3, rep.max_decomposition_residual, gaps, rep.residuals)

    monkeypatch.setattr(cli, "verify_h_theorem", tampered)
    code = main(["verify", "--model", doublet, "--target-mean", "0.5", "--trials", "10"])
    if code != 2 or "passed=false" not in capsys.readouterr().out:
        problems.append("verify fail exit")

    verdict(8, not problems, f"100 round trips, {len(bad)} malformed fixtures, "
                             f"verify exit mirrors report; problems={problems}")
