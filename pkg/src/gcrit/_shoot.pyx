# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled fixed-mesh Runge-Kutta kernel for ``y'' + c y' + g Q(s) y = 0``."""
from libc.math cimport fabs, log, fmax

cdef enum:
    MAX_STAGES = 16
cdef double RESCALE = 1e150


def shoot_kernel(const double[::1] h, const double[:, ::1] Q, double g, double c,
                 const double[:, ::1] A, const double[::1] B):
    """Same contract as the NumPy fallback: returns ``(y, dy, nodes, log_scale)``."""
    cdef Py_ssize_t n = Q.shape[0], stages = Q.shape[1]
    cdef Py_ssize_t step, i, j
    cdef double ky[MAX_STAGES]
    cdef double kd[MAX_STAGES]
    cdef double y = 1.0, dy = 0.0, ty, td, hs, big, ny, ndy
    cdef double log_scale = 0.0
    cdef long nodes = 0
    if stages > MAX_STAGES:
        raise ValueError("too many stages")
    if h.shape[0] != n or A.shape[0] < stages or B.shape[0] < stages:
        raise ValueError("inconsistent array shapes")
    for step in range(n):
        hs = h[step]
        for i in range(stages):
            ty = y
            td = dy
            for j in range(i):
                ty += hs * A[i, j] * ky[j]
                td += hs * A[i, j] * kd[j]
            ky[i] = td
            kd[i] = -g * Q[step, i] * ty - c * td
        ny = y
        ndy = dy
        for i in range(stages):
            ny += hs * B[i] * ky[i]
            ndy += hs * B[i] * kd[i]
        if (ny < 0.0 < y) or (y < 0.0 < ny):
            nodes += 1
        y = ny
        dy = ndy
        big = fmax(fabs(y), fabs(dy))
        if big > RESCALE:
            y /= big
            dy /= big
            log_scale += log(big)
    return y, dy, nodes, log_scale
