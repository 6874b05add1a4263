"""Central finite-difference stencils with one Richardson extrapolation level.

Tensor-product stencils over multiindices up to total order 4.  Per-axis
stencils are the standard 5-point central formulas; first and second
derivatives carry O(h^4) truncation, third and fourth O(h^2).  Richardson
combines evaluations at steps h and h/2 using the base order of the stencil.
"""

from __future__ import annotations

import numpy as np

from .errors import DerivativeOrderError

MAX_ORDER = 4

# per-axis central stencils on unit step: (offsets, coefficients, base error order)
_AXIS_STENCILS = {
    0: (np.array([0.0]), np.array([1.0]), 99),
    1: (np.array([-2.0, -1.0, 1.0, 2.0]),
        np.array([1.0, -8.0, 8.0, -1.0]) / 12.0, 4),
    2: (np.array([-2.0, -1.0, 0.0, 1.0, 2.0]),
        np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0, 4),
    3: (np.array([-2.0, -1.0, 1.0, 2.0]),
        np.array([-1.0, 2.0, -2.0, 1.0]) / 2.0, 2),
    4: (np.array([-2.0, -1.0, 0.0, 1.0, 2.0]),
        np.array([1.0, -4.0, 6.0, -4.0, 1.0]), 2),
}


def tensor_stencil(alpha, step):
    """Offsets, coefficients and base order for the mixed derivative D^alpha.

    Returns (offsets, coeffs, base_order) with offsets of shape (m, n) in
    actual coordinates (already scaled by ``step``) and coeffs carrying the
    1/h^|alpha| normalization.
    """
    alpha = tuple(int(a) for a in alpha)
    if sum(alpha) > MAX_ORDER:
        raise DerivativeOrderError(f"derivative order {sum(alpha)} exceeds cap {MAX_ORDER}")
    if any(a < 0 for a in alpha):
        raise ValueError("multiindex components must be nonnegative")
    n = len(alpha)
    offsets = np.zeros((1, n))
    coeffs = np.array([1.0])
    base = 99
    for axis, order in enumerate(alpha):
        if order == 0:
            continue
        offs, cfs, b = _AXIS_STENCILS[order]
        base = min(base, b)
        new_offsets = np.repeat(offsets, len(offs), axis=0)
        new_offsets[:, axis] += np.tile(offs * step, len(offsets))
        coeffs = np.repeat(coeffs, len(cfs)) * np.tile(cfs / step**order, len(coeffs))
        offsets = new_offsets
    return offsets, coeffs, base


def fd_derivative(f_batch, center, alpha, step, richardson=True):
    """D^alpha f at ``center`` by tensor central differences.

    ``f_batch`` maps an (m, n) array of points to an (m,) array of values.
    With ``richardson`` the h and h/2 evaluations combine with the stencil's
    base order; the leading error then drops by two orders of h.
    """
    center = np.asarray(center, dtype=float)
    if sum(alpha) == 0:
        return float(f_batch(center[None, :])[0])
    offs, cfs, base = tensor_stencil(alpha, step)
    d_h = float(cfs @ f_batch(center[None, :] + offs))
    if not richardson:
        return d_h
    offs2, cfs2, _ = tensor_stencil(alpha, step / 2.0)
    d_h2 = float(cfs2 @ f_batch(center[None, :] + offs2))
    fac = 2.0**base
    return (fac * d_h2 - d_h) / (fac - 1.0)


def hessian(f_batch, center, step, richardson=True):
    """Symmetric Hessian of a scalar function by central differences."""
    center = np.asarray(center, dtype=float)
    n = center.size
    H = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            alpha = [0] * n
            alpha[i] += 1
            alpha[j] += 1
            H[i, j] = H[j, i] = fd_derivative(f_batch, center, alpha, step, richardson)
    return H


def gradient(f_batch, center, step, richardson=True):
    center = np.asarray(center, dtype=float)
    n = center.size
    g = np.empty(n)
    for i in range(n):
        alpha = [0] * n
        alpha[i] = 1
        g[i] = fd_derivative(f_batch, center, alpha, step, richardson)
    return g
