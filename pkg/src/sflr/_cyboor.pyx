# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled B-spline evaluation kernel (Cox-de Boor recursion).

Same contract as sflr._pyboor.eval_basis_matrix.
"""
import numpy as np


def eval_basis_matrix(knots_in, degree, points_in, deriv=0):
    """Evaluate all basis functions (or a derivative) at a batch of points."""
    cdef double[::1] knots = np.ascontiguousarray(knots_in, dtype=np.float64)
    cdef double[::1] pts = np.ascontiguousarray(points_in, dtype=np.float64)
    cdef Py_ssize_t d = degree
    cdef Py_ssize_t dv = deriv
    cdef Py_ssize_t nk = knots.shape[0]
    cdef Py_ssize_t npts = pts.shape[0]
    cdef Py_ssize_t n_basis = nk - d - 1
    if dv < 0 or dv > d:
        raise ValueError(f"derivative order {dv} outside [0, {d}]")

    out = np.zeros((npts, n_basis))
    cdef double[:, ::1] res = out
    scratch = np.zeros(nk - 1)
    cdef double[::1] w = scratch
    cdef Py_ssize_t p, i, k
    cdef double t, den1, den2, v
    cdef double t_end = knots[nk - 1]
    cdef bint value_level, last_closed

    for p in range(npts):
        t = pts[p]
        for i in range(nk - 1):
            if knots[i] < knots[i + 1]:
                last_closed = knots[i + 1] == t_end
                if t >= knots[i] and (t < knots[i + 1] or (last_closed and t <= t_end)):
                    w[i] = 1.0
                else:
                    w[i] = 0.0
            else:
                w[i] = 0.0
        for k in range(1, d + 1):
            value_level = k <= d - dv
            # ascending overwrite is safe: slot i uses old w[i], w[i+1]
            for i in range(nk - k - 1):
                den1 = knots[i + k] - knots[i]
                den2 = knots[i + k + 1] - knots[i + 1]
                v = 0.0
                if value_level:
                    if den1 > 0.0:
                        v += (t - knots[i]) / den1 * w[i]
                    if den2 > 0.0:
                        v += (knots[i + k + 1] - t) / den2 * w[i + 1]
                else:
                    if den1 > 0.0:
                        v += k / den1 * w[i]
                    if den2 > 0.0:
                        v -= k / den2 * w[i + 1]
                w[i] = v
        for i in range(n_basis):
            res[p, i] = w[i]
    return out
