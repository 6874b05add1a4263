"""Standard mollifier kernels, their derivatives, and convolution quadrature.

The kernel is the compactly supported bump C*exp(1/(|x|^2 - 1)) on the open
unit ball, rescaled to radius r by r^-n * k(x/r).  Partial derivatives up to
total order 4 are closed-form: the bump is exp composed with a rational
function of |x|^2, so each derivative is a polynomial in 1/(|x|^2-1) and the
coordinates times the bump itself.

Quadrature: the bump is smooth but has essential flatness at the support
boundary, which stalls plain Gauss-Legendre long before the tolerances the
derivative convolutions need.  Kernel-weighted integrals therefore use a
ball-adapted rule: composite Gauss-Legendre radial panels refined
geometrically toward the support radius, crossed with spectrally accurate
angular nodes.  A plain tensor-product box rule remains available for
generic integrands.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import DerivativeOrderError, DomainMarginError

MAX_DERIVATIVE_ORDER = 4
DEFAULT_QUAD_ORDER = 24

_norm_const_cache: dict[tuple[int, float], float] = {}
_norm_const_lock = threading.Lock()
_pairings_cache: dict[tuple[int, ...], list] = {}


def gauss_legendre_1d(lo, hi, order):
    """Nodes and weights for Gauss-Legendre on [lo, hi]."""
    x, w = np.polynomial.legendre.leggauss(order)
    mid = 0.5 * (hi + lo)
    half = 0.5 * (hi - lo)
    return mid + half * x, half * w


def composite_radial(radius, levels, panel_order):
    """Composite Gauss-Legendre on [0, radius], panels halving toward the endpoint."""
    breaks = [0.0] + [1.0 - 0.5**k for k in range(1, levels + 1)] + [1.0]
    xs, ws = [], []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        x, w = gauss_legendre_1d(lo * radius, hi * radius, panel_order)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


@dataclass(frozen=True)
class QuadratureRule:
    """Positive-weight node/weight table with points of shape (m, dim)."""

    points: np.ndarray
    weights: np.ndarray
    order: int

    @classmethod
    def box(cls, lo, hi, order=DEFAULT_QUAD_ORDER):
        """Tensor-product Gauss-Legendre over an axis-aligned box."""
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        axes = [gauss_legendre_1d(a, b, order) for a, b in zip(lo, hi)]
        grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
        points = np.stack([g.ravel() for g in grids], axis=-1)
        wgrids = np.meshgrid(*[a[1] for a in axes], indexing="ij")
        weights = np.ones(points.shape[0])
        for w in wgrids:
            weights = weights * w.ravel()
        return cls(points=points, weights=weights, order=order)

    @classmethod
    def ball(cls, dim, radius, panel_order=12, levels=5, angular=64):
        """Rule adapted to the support ball of a mollifier of the given radius.

        Radial panels refine geometrically toward the boundary where the bump
        and its derivatives have their transition layers; angular nodes are
        trapezoid (2D) or Gauss x trapezoid (3D), spectrally accurate for the
        smooth angular dependence.
        """
        if dim == 1:
            rho, wr = composite_radial(radius, levels, panel_order)
            pts = np.concatenate([-rho[::-1], rho])[:, None]
            wts = np.concatenate([wr[::-1], wr])
            return cls(points=pts, weights=wts, order=panel_order)
        rho, wr = composite_radial(radius, levels, panel_order)
        if dim == 2:
            theta = 2.0 * np.pi * np.arange(angular) / angular
            R, T = np.meshgrid(rho, theta, indexing="ij")
            pts = np.stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()], axis=-1)
            wts = np.repeat(wr, angular) * (2.0 * np.pi / angular) * R.ravel()
            return cls(points=pts, weights=wts, order=panel_order)
        if dim == 3:
            n_pol = max(8, angular // 4)
            n_azi = max(16, angular // 2)
            u, wu = np.polynomial.legendre.leggauss(n_pol)
            phi = 2.0 * np.pi * np.arange(n_azi) / n_azi
            R, U, P = np.meshgrid(rho, u, phi, indexing="ij")
            s = np.sqrt(1.0 - U**2)
            pts = np.stack([(R * s * np.cos(P)).ravel(),
                            (R * s * np.sin(P)).ravel(),
                            (R * U).ravel()], axis=-1)
            WU = np.meshgrid(wr, wu, np.full(n_azi, 2.0 * np.pi / n_azi), indexing="ij")
            wts = WU[0].ravel() * WU[1].ravel() * WU[2].ravel() * (R.ravel() ** 2)
            return cls(points=pts, weights=wts, order=panel_order)
        raise ValueError("ball rules support dimensions 1-3")

    def integrate(self, f):
        return float(self.weights @ np.asarray(f(self.points), dtype=float))


def _bump_h_derivatives(u, max_order):
    """h(u) = exp(1/(u-1)) on u < 1 and its derivatives h', ..., up to max_order.

    Returns a list [h0, h1, ...] of arrays matching u's shape; entries are 0
    where u >= 1 (the bump is flat there).
    """
    u = np.asarray(u, dtype=float)
    inside = u < 1.0 - 1e-9
    um1 = np.where(inside, u - 1.0, -1.0)
    v = 1.0 / um1
    e = np.where(inside, np.exp(v), 0.0)
    out = [e]
    if max_order == 0:
        return out
    v1 = -(v * v)
    v2 = 2.0 * v**3
    v3 = -6.0 * v**4
    v4 = 24.0 * v**5
    out.append(v1 * e)
    if max_order >= 2:
        out.append((v2 + v1 * v1) * e)
    if max_order >= 3:
        out.append((v3 + 3.0 * v1 * v2 + v1**3) * e)
    if max_order >= 4:
        out.append((v4 + 4.0 * v1 * v3 + 3.0 * v2 * v2 + 6.0 * v1 * v1 * v2 + v1**4) * e)
    return out


def _slot_pairings(slots):
    """Partitions of derivative slots into singletons and pairs.

    Differentiating h(|x|^2) repeatedly: each singleton slot contributes a
    factor 2*x_axis, each pair a factor 2*delta_{axis,axis'}; the number of
    blocks selects the order of the h-derivative factor.
    """
    key = tuple(slots)
    if key in _pairings_cache:
        return _pairings_cache[key]

    def rec(remaining):
        if not remaining:
            return [([], [])]
        first, rest = remaining[0], remaining[1:]
        results = []
        for singles, pairs in rec(rest):
            results.append(([first] + singles, pairs))
        for i in range(len(rest)):
            sub = rest[:i] + rest[i + 1:]
            for singles, pairs in rec(sub):
                results.append((singles, [(first, rest[i])] + pairs))
        return results

    parts = rec(list(slots))
    _pairings_cache[key] = parts
    return parts


def _unit_kernel_values(points, dim, norm_const):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    u = np.einsum("ij,ij->i", points, points)
    return norm_const * _bump_h_derivatives(u, 0)[0]


def _unit_kernel_derivative(points, alpha, norm_const):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    slots = []
    for axis, a in enumerate(alpha):
        slots.extend([axis] * int(a))
    m = len(slots)
    if m == 0:
        return _unit_kernel_values(points, len(alpha), norm_const)
    u = np.einsum("ij,ij->i", points, points)
    hs = _bump_h_derivatives(u, m)
    total = np.zeros(points.shape[0])
    for singles, pairs in _slot_pairings(slots):
        factor = np.full(points.shape[0], 1.0)
        ok = True
        for a, b in pairs:
            if a != b:
                ok = False
                break
            factor *= 2.0
        if not ok:
            continue
        for s in singles:
            factor = factor * (2.0 * points[:, s])
        total += hs[len(singles) + len(pairs)] * factor
    return norm_const * total


_SPHERE_AREA = {1: 2.0, 2: 2.0 * np.pi, 3: 4.0 * np.pi}


def _normalization_constant(dim, radius, levels=8, panel_order=24):
    """1 / integral of the unnormalized unit bump, cached per (dim, radius).

    The bump is radial, so the n-dimensional integral reduces exactly to a
    1D radial integral against rho^(n-1); the composite radial rule at high
    order pins the constant to near machine precision.  The value does not
    depend on the radius (rescaling preserves the integral) but the cache is
    keyed on both so that first access stays idempotent per configuration.
    """
    key = (int(dim), float(radius))
    cached = _norm_const_cache.get(key)
    if cached is not None:
        return cached
    rho, wr = composite_radial(1.0, levels, panel_order)
    vals = _bump_h_derivatives(rho * rho, 0)[0]
    integral = _SPHERE_AREA[dim] * float(wr @ (vals * rho ** (dim - 1)))
    value = 1.0 / integral
    with _norm_const_lock:
        _norm_const_cache.setdefault(key, value)
        return _norm_const_cache[key]


@dataclass(frozen=True)
class MollifierKernel:
    """The standard mollifier rescaled to a given support radius."""

    dim: int
    radius: float
    norm_const: float = field(default=0.0)

    def __post_init__(self):
        if not 1 <= self.dim <= 3:
            raise ValueError("kernel dimension must be 1, 2 or 3")
        if self.radius <= 0:
            raise ValueError("kernel radius must be positive")
        if self.norm_const <= 0.0:
            object.__setattr__(self, "norm_const", _normalization_constant(self.dim, self.radius))

    def __call__(self, points):
        return self.eval(points)

    def eval(self, points):
        """Kernel values at one point (dim,) or a batch (m, dim)."""
        pts = np.asarray(points, dtype=float)
        squeeze = pts.ndim == 1
        vals = _unit_kernel_values(np.atleast_2d(pts) / self.radius, self.dim, self.norm_const)
        vals = vals / self.radius**self.dim
        return float(vals[0]) if squeeze else vals

    def eval_derivative(self, alpha, points):
        """D^alpha of the kernel, |alpha| <= 4, closed form."""
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.dim:
            raise ValueError("multiindex length must equal kernel dimension")
        order = sum(alpha)
        if order > MAX_DERIVATIVE_ORDER:
            raise DerivativeOrderError(f"kernel derivatives capped at order {MAX_DERIVATIVE_ORDER}")
        pts = np.asarray(points, dtype=float)
        squeeze = pts.ndim == 1
        vals = _unit_kernel_derivative(np.atleast_2d(pts) / self.radius, alpha, self.norm_const)
        vals = vals / self.radius ** (self.dim + order)
        return float(vals[0]) if squeeze else vals

    def support_rule(self, panel_order=12, levels=5, angular=64):
        """Ball-adapted rule over the support, accurate for kernel-weighted integrals."""
        return QuadratureRule.ball(self.dim, self.radius, panel_order=panel_order,
                                   levels=levels, angular=angular)


@dataclass(frozen=True)
class BlendedKernel:
    """Convex blend (1-u)*inner + u*outer of two mollifiers (same dimension)."""

    inner: MollifierKernel
    outer: MollifierKernel
    blend: float

    def __post_init__(self):
        if self.inner.dim != self.outer.dim:
            raise ValueError("blended kernels must share a dimension")
        if not 0.0 < self.blend < 1.0:
            raise ValueError("blend weight must lie in (0, 1)")

    @property
    def dim(self):
        return self.inner.dim

    def eval(self, points):
        return (1.0 - self.blend) * self.inner.eval(points) + self.blend * self.outer.eval(points)

    def eval_derivative(self, alpha, points):
        return ((1.0 - self.blend) * self.inner.eval_derivative(alpha, points)
                + self.blend * self.outer.eval_derivative(alpha, points))


def _check_margin(domain, point, radius):
    if domain is None:
        return
    if not domain.contains(point, margin=radius):
        raise DomainMarginError(
            f"point {np.asarray(point)} closer than {radius} to the domain boundary")


def _slot_values(f, slot, x, y, nodes):
    x = np.asarray(x, dtype=float)
    if slot == "first":
        shifted = x[None, :] - nodes
        return np.asarray(f(shifted, y), dtype=float)
    if slot == "second":
        y = np.asarray(y, dtype=float)
        shifted = y[None, :] - nodes
        return np.asarray(f(x, shifted), dtype=float)
    raise ValueError("slot must be 'first' or 'second'")


def convolve_partial(f, kern, slot, x, y=None, panel_order=12, domain=None):
    """(kern * f)(x, y) convolving the chosen slot.

    ``f`` must accept a batch of points in the convolved slot and broadcast;
    for slot='first' it is called as f(X_batch, y).  ``domain``, when given,
    is the Box of the convolved variable and enforces the margin precondition.
    """
    point = x if slot == "first" else y
    _check_margin(domain, point, kern.radius)
    rule = kern.support_rule(panel_order)
    kvals = kern.eval(rule.points)
    vals = _slot_values(f, slot, x, y, rule.points)
    return float(np.dot(rule.weights * kvals, vals))


def convolve_partial_derivative(f, kern, slot, alpha, x, y=None,
                                panel_order=12, domain=None):
    """Exact D^alpha of the smoothing: convolve f with the kernel derivative."""
    alpha = tuple(int(a) for a in alpha)
    if sum(alpha) > MAX_DERIVATIVE_ORDER:
        raise DerivativeOrderError(f"convolution derivatives capped at order {MAX_DERIVATIVE_ORDER}")
    point = x if slot == "first" else y
    _check_margin(domain, point, kern.radius)
    rule = kern.support_rule(panel_order)
    kvals = kern.eval_derivative(alpha, rule.points)
    vals = _slot_values(f, slot, x, y, rule.points)
    return float(np.dot(rule.weights * kvals, vals))


def smooth_function(f, kern, x, panel_order=12, domain=None, alpha=None):
    """Mollifier smoothing of a single-variable field, optionally differentiated."""
    wrapped = lambda X, _y: f(X)
    if alpha is None:
        return convolve_partial(wrapped, kern, "first", x, None, panel_order, domain)
    return convolve_partial_derivative(wrapped, kern, "first", alpha, x, None, panel_order, domain)
