# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: Horner re-centering, wedge products, Jacobi sweeps."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, hypot
from libc.stdint cimport int64_t

cnp.import_array()


cdef extern from "complex.h" nogil:
    double cabs(double complex)
    double complex conj(double complex)
    double creal(double complex)


def taylor_shift(c, double complex z):
    """Coefficients of f(z + h) in powers of h by repeated synthetic division."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.array(c, dtype=np.complex128)
    cdef double complex[::1] g = out
    cdef Py_ssize_t M = g.shape[0]
    cdef Py_ssize_t i, k
    for i in range(M - 1):
        for k in range(M - 2, i - 1, -1):
            g[k] = g[k] + z * g[k + 1]
    return out


cdef extern from *:
    int popcountll "__builtin_popcountll"(unsigned long long) nogil


def grassmann_mul(x, y, int N):
    """Wedge product; only disjoint mask pairs are visited (3^N of them)."""
    from ._basis import grassmann_basis
    masks_arr, rank_arr = grassmann_basis(N)
    cdef const int64_t[::1] masks = masks_arr
    cdef const int64_t[::1] rank = rank_arr
    cdef const double complex[::1] xv = np.ascontiguousarray(x, dtype=np.complex128)
    cdef const double complex[::1] yv = np.ascontiguousarray(y, dtype=np.complex128)
    cdef Py_ssize_t size = masks.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.zeros(size, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef Py_ssize_t i
    cdef int64_t mi, mj, free, low, full = (<int64_t>1 << N) - 1
    cdef double complex xi, yj
    # above[m] has bit a set iff an odd number of bits of m lie below a,
    # so popcount(mi & above[mj]) has the parity of the reordering sign
    above_arr = np.zeros(full + 1, dtype=np.int64)
    cdef int64_t[::1] above = above_arr
    with nogil:
        for mj in range(1, full + 1):
            low = mj & -mj
            above[mj] = above[mj ^ low] ^ (full & ~((low << 1) - 1))
        for i in range(size):
            xi = xv[i]
            if xi == 0:
                continue
            mi = masks[i]
            free = full & ~mi
            mj = free
            while True:
                yj = yv[rank[mj]]
                if yj != 0:
                    if popcountll(<unsigned long long>(mi & above[mj])) & 1:
                        o[rank[mi | mj]] -= xi * yj
                    else:
                        o[rank[mi | mj]] += xi * yj
                if mj == 0:
                    break
                mj = (mj - 1) & free
    return out


def hermitian_eigvalsh(A, double tol=1e-15, int max_sweeps=60):
    """Eigenvalues of a Hermitian matrix by row-cyclic complex Jacobi sweeps."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] W = np.array(A, dtype=np.complex128, order="C")
    cdef double complex[:, ::1] a = W
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, k
    cdef int sweep
    cdef double scale = 0.0, off, r, app, aqq, tau, t, c, s
    cdef double complex phase, xp, xq
    for p in range(n):
        for q in range(n):
            scale += cabs(a[p, q]) ** 2
    scale = sqrt(scale)
    if n <= 1 or scale == 0.0:
        return np.sort(W.diagonal().real.copy())
    with nogil:
        for sweep in range(max_sweeps):
            off = 0.0
            for p in range(n):
                for q in range(n):
                    if p != q:
                        off += cabs(a[p, q]) ** 2
            if sqrt(off) <= tol * scale:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    r = cabs(a[p, q])
                    if r == 0.0:
                        continue
                    phase = a[p, q] / r
                    app = creal(a[p, p])
                    aqq = creal(a[q, q])
                    tau = (aqq - app) / (2.0 * r)
                    if tau >= 0:
                        t = 1.0 / (tau + hypot(1.0, tau))
                    else:
                        t = -1.0 / (-tau + hypot(1.0, tau))
                    c = 1.0 / hypot(1.0, t)
                    s = t * c
                    # U = [[c, s], [-s conj(phase), c conj(phase)]] on the (p, q) plane
                    for k in range(n):
                        xp = a[k, p]
                        xq = conj(phase) * a[k, q]
                        a[k, p] = c * xp - s * xq
                        a[k, q] = s * xp + c * xq
                    for k in range(n):
                        xp = a[p, k]
                        xq = phase * a[q, k]
                        a[p, k] = c * xp - s * xq
                        a[q, k] = s * xp + c * xq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
    return np.sort(W.diagonal().real.copy())
