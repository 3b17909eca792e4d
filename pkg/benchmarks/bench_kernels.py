"""Compare the compiled and pure-Python kernel backends.

Kernel timings call both modules directly. The end-to-end timings (oracle and
verify) run each backend in a child process, since the backend is chosen once
at import.

    python benchmarks/bench_kernels.py [--repeat 5] [--n 8]
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from eventgibbs import _pykernels

try:
    from eventgibbs import _ckernels
except ImportError:
    _ckernels = None

END_TO_END = """
import json, time
import numpy as np
from eventgibbs import BACKEND, attainable_mean_range, default_eventset, verify_h_theorem
from eventgibbs import PowersetDistribution, ValueFunction
from eventgibbs.oracle import OracleConfig, minimize_kl
rng = np.random.default_rng(0)
es = default_eventset({n})
base = PowersetDistribution(es, (w := rng.uniform(0.05, 1, es.size)) / w.sum())
v = ValueFunction(es, rng.uniform(0, 5, es.size))
t = attainable_mean_range(base, v).midpoint
t0 = time.perf_counter()
res = minimize_kl(base, v, t, OracleConfig(max_iters=50000, tol=1e-10))
t1 = time.perf_counter()
verify_h_theorem(base, v, t, trials=1000, seed=0)
t2 = time.perf_counter()
print(json.dumps(dict(backend=BACKEND, oracle=t1 - t0, iters=res.iterations, verify=t2 - t1)))
"""


def kernel_cases(n, rng):
    size = 2 ** n
    v = rng.uniform(0, 5, size)
    base = rng.uniform(0.05, 1, size)
    base /= base.sum()
    out = np.empty(size)
    half = size // 2
    c_lo, c_hi = rng.normal(size=half), rng.normal(size=half)
    w = rng.uniform(0, 1, (half, half))
    p = base.copy()
    idx = np.array([0, 1, 2, 3])
    d = np.array([0.4, -0.6, 0.6, -0.4])
    smax = float(min(p[1] / 0.6, p[3] / 0.4))
    return {
        "tilt": lambda k: k.tilt(v, base, -0.7, out),
        "kl": lambda k: k.kl(p, base),
        "decomposition": lambda k: k.decomposition(base, p),
        "pair_scan": lambda k: k.pair_scan(c_lo, c_hi, w),
        "line_search": lambda k: k.line_search(p, base, idx, d, smax),
    }


def best_of(fn, repeat):
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, default=8, help="number of events")
    args = ap.parse_args()
    if _ckernels is None:
        sys.exit("compiled backend not built; run `pip install -e . --no-build-isolation`")

    print(f"kernels at n={args.n} (2^n = {2 ** args.n} atoms)")
    print(f"{'kernel':<14}{'python':>12}{'cython':>12}{'speedup':>10}")
    for name, fn in kernel_cases(args.n, np.random.default_rng(1)).items():
        tp = best_of(lambda: fn(_pykernels), args.repeat)
        tc = best_of(lambda: fn(_ckernels), args.repeat)
        print(f"{name:<14}{tp * 1e6:>10.1f}us{tc * 1e6:>10.1f}us{tp / tc:>9.1f}x")

    print(f"\nend to end at n={args.n}")
    rows = {}
    for flag in ("1", "0"):
        env = dict(os.environ, EVENTGIBBS_PURE_PYTHON=flag)
        res = subprocess.run([sys.executable, "-c", END_TO_END.format(n=args.n)],
                             env=env, capture_output=True, text=True, check=True)
        row = json.loads(res.stdout)
        rows[row["backend"]] = row
    for task in ("oracle", "verify"):
        tp, tc = rows["python"][task], rows["cython"][task]
        print(f"{task:<14}{tp:>11.3f}s{tc:>11.3f}s{tp / tc:>9.1f}x")
    print(f"(oracle iterations: {rows['cython']['iters']})")


if __name__ == "__main__":
    main()
