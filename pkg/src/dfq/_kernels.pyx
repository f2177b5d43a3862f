# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: fixed-point iteration, code assignment, bit packing.

Mirrors dfq._kernels_py; the dispatcher in dfq.kernels picks whichever is
importable.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport erf, erfc, exp, fabs, isinf, sqrt

cnp.import_array()

KIND_GAUSSIAN = 0
KIND_LAPLACE = 1

cdef double INV_SQRT_2PI = 0.3989422804014326779399
cdef double INV_SQRT_2 = 0.7071067811865475244008
cdef int GAUSS = 0


cdef inline double _phi(double x) noexcept nogil:
    if isinf(x):
        return 0.0
    return INV_SQRT_2PI * exp(-0.5 * x * x)


cdef inline void _gauss_m01(double a, double b, double* mass, double* m1) noexcept nogil:
    if a >= 0.0:
        mass[0] = 0.5 * (erfc(a * INV_SQRT_2) - erfc(b * INV_SQRT_2))
    elif b <= 0.0:
        mass[0] = 0.5 * (erfc(-b * INV_SQRT_2) - erfc(-a * INV_SQRT_2))
    else:
        mass[0] = 0.5 * (erf(b * INV_SQRT_2) + erf(-a * INV_SQRT_2))
    m1[0] = _phi(a) - _phi(b)


cdef inline double _lap_tail0(double x) noexcept nogil:
    if isinf(x):
        return 0.0
    return 0.5 * exp(-x)


cdef inline double _lap_tail1(double x) noexcept nogil:
    if isinf(x):
        return 0.0
    return 0.5 * (x + 1.0) * exp(-x)


cdef inline void _lap_m01(double a, double b, double* mass, double* m1) noexcept nogil:
    if a >= 0.0:
        mass[0] = _lap_tail0(a) - _lap_tail0(b)
        m1[0] = _lap_tail1(a) - _lap_tail1(b)
    elif b <= 0.0:
        mass[0] = _lap_tail0(-b) - _lap_tail0(-a)
        m1[0] = -(_lap_tail1(-b) - _lap_tail1(-a))
    else:
        mass[0] = (_lap_tail0(0.0) - _lap_tail0(-a)) + (_lap_tail0(0.0) - _lap_tail0(b))
        m1[0] = (_lap_tail1(0.0) - _lap_tail1(b)) - (_lap_tail1(0.0) - _lap_tail1(-a))


cdef inline void _m01(int kind, double a, double b, double* mass, double* m1) noexcept nogil:
    if kind == GAUSS:
        _gauss_m01(a, b, mass, m1)
    else:
        _lap_m01(a, b, mass, m1)


def lloyd_iterate(int kind, levels0, double tol, long max_iter, record=None):
    """See dfq._kernels_py.lloyd_iterate; identical contract."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] levels = \
        np.array(levels0, dtype=np.float64)
    cdef Py_ssize_t K = levels.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] inner = \
        0.5 * (levels[:-1] + levels[1:])
    cdef cnp.ndarray[cnp.float64_t, ndim=1] changes = np.empty(max_iter)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] drops = np.empty(max_iter)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] newlv = np.empty(K)

    cdef double[::1] lv = levels
    cdef double[::1] nl = newlv
    cdef double[::1] bd = inner
    cdef double[::1] ch = changes
    cdef double[::1] dr = drops

    cdef bint converged = False
    cdef bint track = record is not None
    cdef Py_ssize_t t, i, iters = 0
    cdef double lo, hi, mass, m1, d, change, level_drop, boundary_drop
    cdef double u, v, mm, ss, term
    cdef double INF = float("inf")

    for t in range(max_iter):
        change = 0.0
        level_drop = 0.0
        with nogil:
            for i in range(K):
                lo = -INF if i == 0 else bd[i - 1]
                hi = INF if i == K - 1 else bd[i]
                _m01(kind, lo, hi, &mass, &m1)
                nl[i] = m1 / mass
                d = nl[i] - lv[i]
                if fabs(d) > change:
                    change = fabs(d)
                level_drop += mass * d * d
            for i in range(K):
                lv[i] = nl[i]
            boundary_drop = 0.0
            for i in range(K - 1):
                u = bd[i]
                v = 0.5 * (lv[i] + lv[i + 1])
                if v >= u:
                    _m01(kind, u, v, &mass, &m1)
                    term = (lv[i + 1] - lv[i]) * ((lv[i] + lv[i + 1]) * mass - 2.0 * m1)
                else:
                    _m01(kind, v, u, &mass, &m1)
                    term = -(lv[i + 1] - lv[i]) * ((lv[i] + lv[i + 1]) * mass - 2.0 * m1)
                if term > 0.0:
                    boundary_drop += term
                bd[i] = v
        ch[t] = change
        dr[t] = level_drop + boundary_drop
        iters = t + 1
        if track:
            record.append((levels.copy(), inner.copy()))
        if change < tol:
            converged = True
            break
    return (levels, inner, iters, converged,
            changes[:iters].copy(), drops[:iters].copy())


def assign_codes(values, interior, double offset, double scale):
    """Interval index per value; exact boundary hits go right."""
    vals = np.ascontiguousarray(values, dtype=np.float32)
    bnds = np.ascontiguousarray(interior, dtype=np.float64)
    cdef Py_ssize_t n = vals.shape[0]
    cdef Py_ssize_t nb = bnds.shape[0]
    out = np.empty(n, dtype=np.uint32)
    cdef const float[::1] v = vals
    cdef const double[::1] b = bnds
    cdef unsigned int[::1] o = out
    cdef Py_ssize_t i, lo, hi, mid
    cdef double z
    with nogil:
        for i in range(n):
            z = (<double>v[i] - offset) / scale
            lo = 0
            hi = nb
            while lo < hi:
                mid = (lo + hi) >> 1
                if b[mid] <= z:
                    lo = mid + 1
                else:
                    hi = mid
            o[i] = <unsigned int>lo
    return out


def pack_bits(codes, int bits):
    """Pack codes little-endian, `bits` bits each, zero-padded to a byte."""
    cs = np.ascontiguousarray(codes, dtype=np.uint32)
    cdef Py_ssize_t n = cs.shape[0]
    cdef Py_ssize_t nbytes = (n * bits + 7) // 8
    out = np.zeros(nbytes, dtype=np.uint8)
    cdef const unsigned int[::1] c = cs
    cdef unsigned char[::1] o = out
    cdef unsigned long long acc = 0
    cdef int nacc = 0
    cdef Py_ssize_t i, j = 0
    with nogil:
        for i in range(n):
            acc |= (<unsigned long long>c[i]) << nacc
            nacc += bits
            while nacc >= 8:
                o[j] = <unsigned char>(acc & 0xFF)
                acc >>= 8
                nacc -= 8
                j += 1
        if nacc > 0:
            o[j] = <unsigned char>(acc & 0xFF)
    return out


def unpack_bits(data, int bits, Py_ssize_t count):
    """Inverse of pack_bits; `count` is the number of codes to recover."""
    buf = np.frombuffer(bytes(data), dtype=np.uint8)
    if buf.shape[0] * 8 < count * bits:
        raise ValueError("byte buffer too short for requested code count")
    out = np.empty(count, dtype=np.uint32)
    cdef const unsigned char[::1] d = buf
    cdef unsigned int[::1] o = out
    cdef unsigned long long acc = 0
    cdef int nacc = 0
    cdef unsigned long long mask = (<unsigned long long>1 << bits) - 1
    cdef Py_ssize_t i, j = 0
    with nogil:
        for i in range(count):
            while nacc < bits:
                acc |= (<unsigned long long>d[j]) << nacc
                nacc += 8
                j += 1
            o[i] = <unsigned int>(acc & mask)
            acc >>= bits
            nacc -= bits
    return out
