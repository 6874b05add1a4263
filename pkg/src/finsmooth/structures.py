"""Chart boxes and evaluable Finsler structures.

A structure is a function F(x, y) on a box chart whose restriction to each
tangent space is an asymmetric norm.  The smoothness tag records how much of
the smoothing pipeline applies: C0 structures go through vertical level-set
smoothing first, vertically smooth ones (Minkowski norm in every tangent
space, continuous in x) feed the horizontal convolution directly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True)
class Box:
    """Axis-aligned box [lo_1, hi_1] x ... x [lo_n, hi_n]."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", np.asarray(self.lo, dtype=float))
        object.__setattr__(self, "hi", np.asarray(self.hi, dtype=float))
        if self.lo.shape != self.hi.shape or np.any(self.hi <= self.lo):
            raise ValueError("box needs hi > lo componentwise")

    @property
    def dim(self):
        return self.lo.size

    @property
    def center(self):
        return 0.5 * (self.lo + self.hi)

    @property
    def extent(self):
        return self.hi - self.lo

    def contains(self, x, margin=0.0):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lo + margin) and np.all(x <= self.hi - margin))

    def shrink(self, margin):
        return Box(self.lo + margin, self.hi - margin)

    def grid(self, counts):
        """Regular grid including the box faces, flattened to (m, dim)."""
        counts = np.broadcast_to(np.asarray(counts, dtype=int), (self.dim,))
        axes = [np.linspace(a, b, max(int(c), 1)) for a, b, c in zip(self.lo, self.hi, counts)]
        grids = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)


class SmoothnessClass(enum.Enum):
    C0 = "c0"
    VERTICAL_SMOOTH = "vertical_smooth"
    SMOOTH = "smooth"

    @property
    def needs_vertical(self):
        return self is SmoothnessClass.C0


@dataclass(frozen=True)
class FinslerField:
    """Evaluable F(x, y) on a chart box.

    ``func`` must broadcast: called with x of shape (..., n) and y of shape
    (..., n) it returns the broadcast shape of the leading axes.  Optional
    ``f_sq_y_derivative(X, y, alpha)`` supplies exact y-derivatives of F^2 at
    a batch of base points (used by the horizontal integrand when available;
    otherwise finite differences are applied to F^2 itself).
    """

    dim: int
    func: Callable
    smoothness: SmoothnessClass
    domain: Box
    x_independent: bool = False
    f_sq_y_derivative: Optional[Callable] = None
    metric: Optional[Callable] = None
    name: str = ""

    def eval(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return float(np.asarray(self.func(x, y)))

    def eval_many(self, x, Y):
        """F(x, Y_k) for a batch of tangent vectors at a single base point."""
        x = np.asarray(x, dtype=float)
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        vals = np.asarray(self.func(x[None, :], Y), dtype=float)
        return np.broadcast_to(vals, (Y.shape[0],)).astype(float, copy=False)

    def eval_grid(self, X, y):
        """F(X_k, y) for a batch of base points and a single tangent vector."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=float)
        vals = np.asarray(self.func(X, y[None, :]), dtype=float)
        return np.broadcast_to(vals, (X.shape[0],)).astype(float, copy=False)

    def eval_fiber(self, x, P):
        """F(x, P) for an arbitrary-shaped batch P of tangent vectors (..., n)."""
        P = np.asarray(P, dtype=float)
        x = np.asarray(x, dtype=float)
        xs = x.reshape((1,) * (P.ndim - 1) + x.shape)
        vals = np.asarray(self.func(xs, P), dtype=float)
        return np.broadcast_to(vals, P.shape[:-1]).astype(float, copy=False)

    def f_sq(self, X, Y):
        vals = np.asarray(self.func(np.asarray(X, dtype=float), np.asarray(Y, dtype=float)))
        return vals * vals

    def norm_at(self, x):
        from .norm import AsymmetricNormField

        x = np.asarray(x, dtype=float)
        return AsymmetricNormField(
            dim=self.dim,
            eval_fn=lambda Y: self.eval_many(x, Y),
            claims_symmetric=False,
            claims_smooth_away_from_0=self.smoothness is not SmoothnessClass.C0,
        )


def quadratic_field(metric_fn, domain, name="", smoothness=SmoothnessClass.VERTICAL_SMOOTH,
                    x_independent=False):
    """Riemannian-type structure F = sqrt(y^T g(x) y) with exact y-derivatives.

    ``metric_fn`` maps (..., n) base points to (..., n, n) symmetric positive
    matrices.  F^2 is quadratic in y, so all y-derivatives of order >= 3
    vanish identically.
    """
    dim = domain.dim

    def func(x, y):
        g = np.asarray(metric_fn(np.asarray(x, dtype=float)))
        y = np.asarray(y, dtype=float)
        val = np.einsum("...ij,...i,...j->...", g, y, y)
        return np.sqrt(np.maximum(val, 0.0))

    def f_sq_y_derivative(X, y, alpha):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=float)
        g = np.asarray(metric_fn(X))
        order = int(sum(alpha))
        if order == 0:
            return np.einsum("kij,i,j->k", g, y, y)
        if order == 1:
            i = list(alpha).index(1)
            return 2.0 * np.einsum("kij,j->ki", g, y)[:, i]
        if order == 2:
            idx = [ax for ax, a in enumerate(alpha) for _ in range(int(a))]
            return 2.0 * g[:, idx[0], idx[1]]
        return np.zeros(X.shape[0])

    return FinslerField(
        dim=dim,
        func=func,
        smoothness=smoothness,
        domain=domain,
        x_independent=x_independent,
        f_sq_y_derivative=f_sq_y_derivative,
        metric=metric_fn,
        name=name,
    )


def norm_field(norm_fn, domain, name="", smoothness=SmoothnessClass.C0,
               f_sq_y_derivative=None):
    """x-independent structure built from a single asymmetric norm on R^n."""

    def func(x, y):
        vals = np.asarray(norm_fn(np.asarray(y, dtype=float)))
        x = np.asarray(x, dtype=float)
        shape = np.broadcast_shapes(x.shape[:-1], np.asarray(y).shape[:-1])
        return np.broadcast_to(vals, shape)

    return FinslerField(
        dim=domain.dim,
        func=func,
        smoothness=smoothness,
        domain=domain,
        x_independent=True,
        f_sq_y_derivative=f_sq_y_derivative,
        name=name,
    )
