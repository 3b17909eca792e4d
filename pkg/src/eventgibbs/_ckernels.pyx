# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Mirrors ``_pykernels`` function for function."""

from libc.math cimport exp, fabs, log, log1p, INFINITY, isnan

BACKEND = "cython"


cdef inline void _neumaier(double x, double *s, double *c) noexcept nogil:
    cdef double t = s[0] + x
    if fabs(s[0]) >= fabs(x):
        c[0] += (s[0] - t) + x
    else:
        c[0] += (x - t) + s[0]
    s[0] = t


def tilt(const double[::1] values, const double[::1] base, double alpha,
         double[::1] out):
    cdef Py_ssize_t m = values.shape[0], i
    cdef double vmin = INFINITY, shift = -INFINITY, w, total = 0.0, tc = 0.0
    cdef double log_z, mean, var, mc = 0.0, vc = 0.0, dv
    with nogil:
        if alpha == 0.0:
            for i in range(m):
                out[i] = base[i]
            log_z = 0.0
        else:
            for i in range(m):
                if base[i] > 0 and values[i] < vmin:
                    vmin = values[i]
            for i in range(m):
                if base[i] > 0:
                    w = alpha * (values[i] - vmin) + log(base[i])
                    if w > shift:
                        shift = w
            for i in range(m):
                if base[i] > 0:
                    w = exp(alpha * (values[i] - vmin) + log(base[i]) - shift)
                    out[i] = w
                    _neumaier(w, &total, &tc)
                else:
                    out[i] = 0.0
            total += tc
            for i in range(m):
                out[i] = out[i] / total
            log_z = alpha * vmin + shift + log(total)
        mean = 0.0
        for i in range(m):
            if base[i] > 0:
                _neumaier(out[i] * values[i], &mean, &mc)
        mean += mc
        var = 0.0
        for i in range(m):
            if base[i] > 0:
                dv = values[i] - mean
                _neumaier(out[i] * dv * dv, &var, &vc)
        var += vc
    return log_z, mean, var


def kl(const double[::1] p, const double[::1] q):
    cdef Py_ssize_t m = p.shape[0], i
    cdef double s = 0.0, c = 0.0
    cdef bint outside = False
    with nogil:
        for i in range(m):
            if p[i] > 0:
                if q[i] <= 0:
                    outside = True
                    break
                _neumaier(p[i] * log(p[i] / q[i]), &s, &c)
    if outside:
        return INFINITY
    return s + c


def decomposition(const double[::1] q, const double[::1] p):
    cdef Py_ssize_t m = p.shape[0], i
    cdef double s = 0.0, c = 0.0, g, h
    with nogil:
        for i in range(m):
            if p[i] > 0:
                g = q[i] / p[i]
                if g > 0:
                    h = g * log1p(g - 1.0) - (g - 1.0)
                else:
                    h = 1.0
                _neumaier(p[i] * h, &s, &c)
    return s + c


def pair_scan(const double[::1] c_lo, const double[::1] c_hi,
              const double[:, ::1] w_lo):
    cdef Py_ssize_t nl = c_lo.shape[0], nh = c_hi.shape[0], i, j
    cdef Py_ssize_t imin = 0, jmin = 0, imax = 0, jmax = 0
    cdef double smin = INFINITY, smax = -INFINITY, s, cl
    cdef bint seen_min = False, seen_max = False
    with nogil:
        for i in range(nl):
            cl = c_lo[i]
            for j in range(nh):
                s = c_hi[j] + w_lo[i, j] * (cl - c_hi[j])
                if isnan(s):
                    s = -INFINITY
                if not seen_min or s < smin:
                    smin = s
                    imin = i
                    jmin = j
                    seen_min = True
                if not seen_max or s > smax:
                    smax = s
                    imax = i
                    jmax = j
                    seen_max = True
    return imin, jmin, smin, imax, jmax, smax


cdef double _segment_slope(double[::1] p, const double[::1] base,
                           const long[::1] idx, const double[::1] d,
                           double s) noexcept nogil:
    cdef Py_ssize_t k
    cdef double total = 0.0, x
    for k in range(idx.shape[0]):
        x = p[idx[k]] + s * d[k]
        if x <= 0.0:
            return INFINITY
        total += d[k] * log(x / base[idx[k]])
    return total


def line_search(double[::1] p, const double[::1] base, const long[::1] idx,
                const double[::1] d, double smax):
    cdef double lo = 0.0, hi = smax, mid
    cdef int it
    if _segment_slope(p, base, idx, d, hi) <= 0.0:
        return hi
    with nogil:
        for it in range(200):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if _segment_slope(p, base, idx, d, mid) > 0.0:
                hi = mid
            else:
                lo = mid
    return lo
