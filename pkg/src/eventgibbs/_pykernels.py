"""Pure-Python (numpy) kernels.

Same signatures and semantics as the compiled ``_ckernels`` module; used when
the extension is not built or ``EVENTGIBBS_PURE_PYTHON`` is set.
"""

import math

import numpy as np

BACKEND = "python"


def tilt(values, base, alpha, out):
    """Exponentially tilt ``base`` by ``alpha * values`` into ``out``.

    Returns ``(log_z, mean, var)`` where ``log_z`` is the log-partition and
    ``mean``/``var`` are the moments of ``values`` under the tilted table.
    Atoms with ``base == 0`` stay exactly zero; ``alpha == 0`` copies
    ``base`` verbatim.
    """
    support = base > 0
    if alpha == 0.0:
        out[:] = base
        log_z = 0.0
    else:
        v = values[support]
        vmin = v.min()
        logw = alpha * (v - vmin) + np.log(base[support])
        shift = logw.max()
        w = np.exp(logw - shift)
        total = math.fsum(w)
        out[:] = 0.0
        out[support] = w / total
        log_z = alpha * vmin + shift + math.log(total)
    p = out[support]
    v = values[support]
    mean = math.fsum(p * v)
    var = math.fsum(p * (v - mean) ** 2)
    return log_z, mean, var


def kl(p, q):
    """``sum p*ln(p/q)`` over ``p > 0``; ``inf`` if ``q`` vanishes there."""
    pos = p > 0
    qp = q[pos]
    if np.any(qp <= 0):
        return math.inf
    pp = p[pos]
    return math.fsum(pp * np.log(pp / qp))


def decomposition(q, p):
    """``sum p*(g ln g - g + 1)`` with ``g = q/p`` over atoms with ``p > 0``."""
    pos = p > 0
    pp = p[pos]
    g = q[pos] / pp
    h = np.ones_like(g)
    nz = g > 0
    gm1 = g[nz] - 1.0
    h[nz] = g[nz] * np.log1p(gm1) - gm1
    return math.fsum(pp * h)


def pair_scan(c_lo, c_hi, w_lo):
    """Min and max of ``w*c_lo[i] + (1-w)*c_hi[j]`` over the ``w_lo`` grid.

    Returns ``(i_min, j_min, s_min, i_max, j_max, s_max)``.
    """
    s = c_hi[None, :] + w_lo * (c_lo[:, None] - c_hi[None, :])
    # -inf rows/cols (zero-mass atoms) give nan where multiplied by zero; never max
    s = np.where(np.isnan(s), -np.inf, s)
    kmin = int(np.argmin(s))
    kmax = int(np.argmax(s))
    nh = s.shape[1]
    return (kmin // nh, kmin % nh, float(s.flat[kmin]),
            kmax // nh, kmax % nh, float(s.flat[kmax]))


def _segment_slope(p, base, idx, d, s):
    total = 0.0
    for k in range(len(idx)):
        x = p[idx[k]] + s * d[k]
        if x <= 0.0:
            return math.inf
        total += d[k] * math.log(x / base[idx[k]])
    return total


def line_search(p, base, idx, d, smax):
    """Exact minimizer of ``H(p + s*d | base)`` over ``s in [0, smax]``.

    ``d`` is supported on ``idx`` and sums to zero. The objective is convex in
    ``s``; bisection on its derivative. Returns the left end of the final
    bracket so no entry is driven to zero.
    """
    lo, hi = 0.0, float(smax)
    if _segment_slope(p, base, idx, d, hi) <= 0.0:
        return hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _segment_slope(p, base, idx, d, mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return lo
