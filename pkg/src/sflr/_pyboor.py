"""Pure-NumPy B-spline evaluation kernel (fallback for the Cython version).

Both kernels share one contract: evaluate every basis function of a
clamped B-spline family, or one of its derivatives, at a batch of points.
"""
from __future__ import annotations

import numpy as np


def eval_basis_matrix(knots, degree, points, deriv=0):
    """Evaluate all B-spline basis functions at many points.

    Cox-de Boor recursion run level by level; the last ``deriv`` levels
    switch to the derivative recurrence, so the result is the
    ``deriv``-th derivative of each degree-``degree`` basis function.

    Parameters
    ----------
    knots : (n_knots,) nondecreasing knot vector.
    degree : spline degree d.
    points : evaluation points, inside [knots[0], knots[-1]].
    deriv : derivative order, 0 <= deriv <= degree.

    Returns
    -------
    (len(points), n_knots - degree - 1) array.

    The rightmost nonempty knot interval is treated as closed so the
    domain endpoint evaluates to its left limit instead of zero.
    """
    knots = np.ascontiguousarray(knots, dtype=np.float64)
    pts = np.ascontiguousarray(points, dtype=np.float64)
    d = int(degree)
    dv = int(deriv)
    if not 0 <= dv <= d:
        raise ValueError(f"derivative order {dv} outside [0, {d}]")
    t_end = knots[-1]

    # level 0: interval indicators
    level = np.zeros((pts.size, knots.size - 1))
    for i in range(knots.size - 1):
        if knots[i] < knots[i + 1]:
            if knots[i + 1] == t_end:
                level[:, i] = (pts >= knots[i]) & (pts <= t_end)
            else:
                level[:, i] = (pts >= knots[i]) & (pts < knots[i + 1])

    for k in range(1, d + 1):
        ncols = knots.size - k - 1
        new = np.zeros((pts.size, ncols))
        value_level = k <= d - dv
        for i in range(ncols):
            den1 = knots[i + k] - knots[i]
            den2 = knots[i + k + 1] - knots[i + 1]
            if value_level:
                if den1 > 0.0:
                    new[:, i] += (pts - knots[i]) / den1 * level[:, i]
                if den2 > 0.0:
                    new[:, i] += (knots[i + k + 1] - pts) / den2 * level[:, i + 1]
            else:
                if den1 > 0.0:
                    new[:, i] += k / den1 * level[:, i]
                if den2 > 0.0:
                    new[:, i] -= k / den2 * level[:, i + 1]
        level = new
    return level
