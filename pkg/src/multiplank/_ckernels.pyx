# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batch kernels. Signatures mirror ``multiplank._pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, INFINITY

cnp.import_array()


def plank_margin(const double[:, :] V, const double[:, :] X):
    cdef Py_ssize_t m = V.shape[0], n = V.shape[1], N = X.shape[0]
    out = np.empty(N, dtype=np.float64)
    cdef double[:] o = out
    cdef Py_ssize_t i, j, k, c
    cdef double nx, best, worst, s, d
    with nogil:
        for i in range(N):
            nx = 0.0
            for c in range(n):
                nx += X[i, c] * X[i, c]
            nx = sqrt(nx)
            worst = INFINITY
            for j in range(m):
                # max over k on squared lengths, one sqrt per j
                best = -1.0
                for k in range(m):
                    if k == j:
                        continue
                    s = 0.0
                    for c in range(n):
                        d = X[i, c] - V[j, c] + V[k, c]
                        s += d * d
                    if s > best:
                        best = s
                if best >= 0.0 and sqrt(best) - nx < worst:
                    worst = sqrt(best) - nx
            o[i] = worst
    return out


def cell_margin(const double[:, :] V, const double[:, :] X):
    cdef Py_ssize_t m = V.shape[0], n = V.shape[1], N = X.shape[0]
    out = np.empty(N, dtype=np.float64)
    cdef double[:] o = out
    cdef Py_ssize_t i, j, k, c
    cdef double own, far, s, d, y
    with nogil:
        for i in range(N):
            o[i] = INFINITY
            for j in range(m):
                # y = x - v_j; distances from y to the points of -V
                own = 0.0
                for c in range(n):
                    y = X[i, c] - V[j, c]
                    d = y + V[j, c]
                    own += d * d
                own = sqrt(own)
                far = -INFINITY
                for k in range(m):
                    if k == j:
                        continue
                    s = 0.0
                    for c in range(n):
                        d = X[i, c] - V[j, c] + V[k, c]
                        s += d * d
                    s = sqrt(s)
                    if s > far:
                        far = s
                if far - own < o[i]:
                    o[i] = far - own
    return out


cdef inline double _gauge(const double[:, :] A, double x0, double x1) noexcept nogil:
    cdef Py_ssize_t e
    cdef double g = -INFINITY, v
    for e in range(A.shape[0]):
        v = A[e, 0] * x0 + A[e, 1] * x1
        if v > g:
            g = v
    return g


def gauge_norms(const double[:, :] A, const double[:, :] X):
    cdef Py_ssize_t N = X.shape[0], i
    out = np.empty(N, dtype=np.float64)
    cdef double[:] o = out
    with nogil:
        for i in range(N):
            o[i] = _gauge(A, X[i, 0], X[i, 1])
    return out


def gauge_plank_margin(const double[:, :] V, const double[:, :] A, const double[:, :] X):
    cdef Py_ssize_t m = V.shape[0], N = X.shape[0]
    out = np.empty(N, dtype=np.float64)
    cdef double[:] o = out
    cdef Py_ssize_t i, j, k
    cdef double gx, best, worst, val
    with nogil:
        for i in range(N):
            gx = _gauge(A, X[i, 0], X[i, 1])
            worst = INFINITY
            for j in range(m):
                best = -INFINITY
                for k in range(m):
                    if k == j:
                        continue
                    val = _gauge(A, X[i, 0] - V[j, 0] + V[k, 0],
                                 X[i, 1] - V[j, 1] + V[k, 1]) - gx
                    if val > best:
                        best = val
                if best < worst:
                    worst = best
            o[i] = worst
    return out


def fan_clearance(const double[:, :] X, const double[:, :] apex, const double[:, :] dirs):
    cdef Py_ssize_t N = X.shape[0], R = apex.shape[0], i, r
    out = np.empty(N, dtype=np.float64)
    cdef double[:] o = out
    cdef double px, py, t, dx, dy, d2, best2, f
    with nogil:
        for i in range(N):
            f = 1.0 - sqrt(X[i, 0] * X[i, 0] + X[i, 1] * X[i, 1])
            best2 = INFINITY
            for r in range(R):
                px = X[i, 0] - apex[r, 0]
                py = X[i, 1] - apex[r, 1]
                t = px * dirs[r, 0] + py * dirs[r, 1]
                if t > 0.0:
                    dx = px - t * dirs[r, 0]
                    dy = py - t * dirs[r, 1]
                else:
                    dx = px
                    dy = py
                d2 = dx * dx + dy * dy
                if d2 < best2:
                    best2 = d2
            if R > 0 and sqrt(best2) < f:
                f = sqrt(best2)
            o[i] = f
    return out
