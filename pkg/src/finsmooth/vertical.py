"""Vertical smoothing on a chart: fiber convolution, radial level-set solve, G.

The structure is convolved along each tangent fiber with a blended kernel
(1-u(eps))*eta_eps + u(eps)*eta_R, R = 2*r_max/r_min.  On the annulus
1/2 <= |y| <= R the smoothed field is strictly radially increasing, so the
level set at value r_max is a star-shaped sphere; solving radially for it in
every direction and rescaling by homogeneity reconstructs a Minkowski norm
field G.  The wide second kernel is what makes the level set strongly
convex: fiber restrictions of an asymmetric norm are never affine across a
window as wide as R.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import findiff
from .errors import ConstantsViolationError, DerivativeOrderError
from .kernel import BlendedKernel, MollifierKernel
from .norm import NormBounds
from .structures import FinslerField

INNER_RADIUS = 0.5
BISECT_WIDTH = 1e-4
NEWTON_RESIDUAL = 1e-12
RADIAL_DERIVATIVE_FRACTION = 7.0 / 128.0


def identity_u(eps):
    return eps


@dataclass(frozen=True)
class VerticalConfig:
    """Constants of the vertical stage: bounds, blend schedule, admissible range."""

    bounds: NormBounds
    dim: int
    u_fn: Callable = identity_u
    tau: float = 0.0

    def __post_init__(self):
        cap = self.blend_cap
        if self.tau <= 0.0:
            object.__setattr__(self, "tau", self._default_tau(cap))
        if not (0.0 < self.tau < cap / 0.899):
            raise ConstantsViolationError("tau outside the admissible interval")
        if self.u_fn(self.tau * (1 - 1e-12)) >= cap:
            raise ConstantsViolationError("u(eps) must stay below r_min/(16*n*r_max) on (0, tau)")

    @property
    def blend_cap(self):
        return self.bounds.r_min / (16.0 * self.dim * self.bounds.r_max)

    @property
    def level(self):
        return self.bounds.r_max

    @property
    def outer_radius(self):
        return 2.0 * self.bounds.r_max / self.bounds.r_min

    def _default_tau(self, cap, safety=0.9):
        hi = min(cap, 1.0 - 1e-9)
        if self.u_fn(hi) < cap:
            return safety * hi
        lo = 0.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if self.u_fn(mid) < cap:
                lo = mid
            else:
                hi = mid
        return safety * lo

    @classmethod
    def from_field(cls, field_or_bounds, dim=None, u_fn=identity_u):
        if isinstance(field_or_bounds, NormBounds):
            if dim is None:
                raise ValueError("dim is required with explicit bounds")
            return cls(bounds=field_or_bounds, dim=dim, u_fn=u_fn)
        from .norm import compute_bounds

        f = field_or_bounds
        return cls(bounds=compute_bounds(f), dim=f.dim, u_fn=u_fn)


@dataclass(frozen=True)
class RegionReport:
    """Sampled Lemma-5.2 diagnostics over the annulus 1/2 <= |y| <= 2 r_max/r_min."""

    min_hessian_eigenvalue: float
    min_radial_derivative: float
    radial_derivative_bound: float
    max_on_inner_sphere: float
    min_on_outer_sphere: float
    level: float
    samples: int

    @property
    def passes(self):
        return (self.min_hessian_eigenvalue > 0.0
                and self.min_radial_derivative >= self.radial_derivative_bound
                and self.max_on_inner_sphere < self.level
                and self.min_on_outer_sphere > self.level)


class VerticalSmoothed:
    """Evaluator for the fiber-smoothed field and the reconstructed norm G."""

    def __init__(self, base: FinslerField, config: VerticalConfig, epsilon: float,
                 panel_order: int = 12, angular: int = 64):
        if not 0.0 < epsilon < config.tau:
            raise ConstantsViolationError(
                f"epsilon {epsilon} outside the admissible interval (0, {config.tau})")
        if base.dim != config.dim:
            raise ValueError("field dimension must match the configuration")
        self.base = base
        self.config = config
        self.epsilon = float(epsilon)
        blend = config.u_fn(epsilon)
        self.blended = BlendedKernel(
            inner=MollifierKernel(base.dim, self.epsilon),
            outer=MollifierKernel(base.dim, config.outer_radius),
            blend=blend,
        )
        self._coefs = (1.0 - blend, blend)
        self._rules = tuple(k.support_rule(panel_order, angular=angular)
                            for k in (self.blended.inner, self.blended.outer))
        self._kvec_cache = {}
        self._phi_cache: dict = {}
        self._lock = threading.Lock()

    # -- fiber convolution ------------------------------------------------

    def _kernel_vecs(self, alpha):
        key = tuple(alpha) if alpha is not None else None
        vecs = self._kvec_cache.get(key)
        if vecs is None:
            kernels = (self.blended.inner, self.blended.outer)
            if key is None:
                vecs = tuple(c * r.weights * k.eval(r.points)
                             for c, r, k in zip(self._coefs, self._rules, kernels))
            else:
                vecs = tuple(c * r.weights * k.eval_derivative(key, r.points)
                             for c, r, k in zip(self._coefs, self._rules, kernels))
            with self._lock:
                self._kvec_cache.setdefault(key, vecs)
                vecs = self._kvec_cache[key]
        return vecs

    def _convolve(self, alpha, x, Y):
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        total = np.zeros(Y.shape[0])
        for rule, kvec in zip(self._rules, self._kernel_vecs(alpha)):
            shifted = Y[:, None, :] - rule.points[None, :, :]
            total += np.asarray(self.base.eval_fiber(x, shifted), dtype=float) @ kvec
        return total

    def smoothed(self, x, Y):
        """(zeta_eps *_v F)(x, y) for a batch of tangent vectors."""
        return self._convolve(None, x, Y)

    def smoothed_derivative(self, alpha, x, Y):
        """Exact y-derivative of the fiber smoothing via kernel derivatives."""
        if sum(alpha) > 4:
            raise DerivativeOrderError("fiber smoothing derivatives capped at order 4")
        return self._convolve(tuple(int(a) for a in alpha), x, Y)

    def radial_derivative(self, x, Y):
        """Directional derivative along y/|y| of the smoothed field."""
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        norms = np.linalg.norm(Y, axis=1)
        out = np.zeros(Y.shape[0])
        for j in range(self.base.dim):
            alpha = [0] * self.base.dim
            alpha[j] = 1
            out += Y[:, j] / norms * self.smoothed_derivative(alpha, x, Y)
        return out

    def smoothed_hessian(self, x, y):
        """Exact y-Hessian of the smoothed field at one point."""
        n = self.base.dim
        H = np.empty((n, n))
        y = np.asarray(y, dtype=float)[None, :]
        for i in range(n):
            for j in range(i, n):
                alpha = [0] * n
                alpha[i] += 1
                alpha[j] += 1
                H[i, j] = H[j, i] = self.smoothed_derivative(alpha, x, y)[0]
        return H

    # -- level-set solve ---------------------------------------------------

    def _phi_key(self, x, theta):
        xk = None if self.base.x_independent else tuple(np.round(np.asarray(x, float), 12))
        return xk, tuple(np.round(np.asarray(theta, float), 12))

    def radial_solve(self, x, theta):
        """The radius in (1/2, 2 r_max/r_min) where the smoothed field hits the level.

        Bracketed bisection (monotone by the radial-derivative bound) down to
        width 1e-4, then Newton with the exact radial derivative.
        """
        key = self._phi_key(x, theta)
        hit = self._phi_cache.get(key)
        if hit is not None:
            return hit
        theta = np.asarray(theta, dtype=float)
        level = self.config.level
        lo, hi = INNER_RADIUS, self.config.outer_radius

        def val(r):
            return float(self.smoothed(x, r * theta[None, :])[0]) - level

        flo, fhi = val(lo), val(hi)
        if not (flo < 0.0 < fhi):
            raise ConstantsViolationError(
                "level not bracketed on the radial interval; bounds/tau are inconsistent "
                f"(f(lo)={flo + level:.6g}, f(hi)={fhi + level:.6g}, level={level:.6g})")
        a, b = lo, hi
        while b - a > BISECT_WIDTH:
            mid = 0.5 * (a + b)
            if val(mid) < 0.0:
                a = mid
            else:
                b = mid
        r = 0.5 * (a + b)
        tol = NEWTON_RESIDUAL * max(1.0, level)
        for _ in range(12):
            f = val(r)
            if abs(f) <= tol:
                break
            df = float(self.radial_derivative(x, (r * theta)[None, :])[0])
            step = f / df
            r_new = r - step
            if not a < r_new < b:
                r_new = 0.5 * (a + b)
            if f > 0:
                b = min(b, r)
            else:
                a = max(a, r)
            r = r_new
        with self._lock:
            self._phi_cache.setdefault(key, r)
            return self._phi_cache[key]

    # -- reconstructed Minkowski field --------------------------------------

    def g_eval(self, x, Y):
        """G(x, y) = |y| * level / phi(x, y/|y|); exactly 1-homogeneous."""
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        out = np.zeros(Y.shape[0])
        norms = np.linalg.norm(Y, axis=1)
        level = self.config.level
        for i in range(Y.shape[0]):
            if norms[i] == 0.0:
                continue
            theta = Y[i] / norms[i]
            out[i] = norms[i] * level / self.radial_solve(x, theta)
        return out

    def g_sq(self, x, Y):
        vals = self.g_eval(x, Y)
        return vals * vals

    def g_y_derivative(self, x, y, alpha, squared=True, richardson=True):
        """Finite-difference y-derivative of G^2 (or G), step scaled to |y|."""
        y = np.asarray(y, dtype=float)
        ny = float(np.linalg.norm(y))
        if ny == 0.0:
            raise ValueError("y-derivatives of G need y != 0")
        h = max(1e-3, 1e-2 * ny)
        fn = (lambda Ys: self.g_sq(x, Ys)) if squared else (lambda Ys: self.g_eval(x, Ys))
        return findiff.fd_derivative(fn, y, alpha, h, richardson=richardson)

    def g_sq_y_derivative_batch(self, X, y, alpha):
        """D^alpha_y G^2(x_k, y) over a batch of base points (horizontal integrand)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.base.x_independent:
            v = self.g_y_derivative(X[0], y, alpha)
            return np.full(X.shape[0], v)
        return np.array([self.g_y_derivative(x, y, alpha) for x in X])

    def region_report(self, x_samples=None, n_dirs=24, n_radii=5):
        """Sampled positivity/ordering checks of the smoothed field on the annulus."""
        if x_samples is None:
            x_samples = [self.base.domain.center]
        x_samples = np.atleast_2d(np.asarray(x_samples, dtype=float))
        dirs = _unit_directions(self.base.dim, n_dirs)
        radii = np.linspace(INNER_RADIUS, self.config.outer_radius, n_radii + 2)[1:-1]
        min_eig = np.inf
        min_rad = np.inf
        max_inner = -np.inf
        min_outer = np.inf
        count = 0
        for x in x_samples:
            for th in dirs:
                Y = radii[:, None] * th[None, :]
                rad = self.radial_derivative(x, Y)
                min_rad = min(min_rad, float(np.min(rad)))
                for r in radii:
                    H = self.smoothed_hessian(x, r * th)
                    min_eig = min(min_eig, float(np.linalg.eigvalsh(H)[0]))
                    count += 1
            inner = self.smoothed(x, INNER_RADIUS * dirs)
            outer = self.smoothed(x, self.config.outer_radius * dirs)
            rad_in = self.radial_derivative(x, INNER_RADIUS * dirs)
            rad_out = self.radial_derivative(x, self.config.outer_radius * dirs)
            min_rad = min(min_rad, float(np.min(rad_in)), float(np.min(rad_out)))
            max_inner = max(max_inner, float(np.max(inner)))
            min_outer = min(min_outer, float(np.min(outer)))
        return RegionReport(
            min_hessian_eigenvalue=min_eig,
            min_radial_derivative=min_rad,
            radial_derivative_bound=RADIAL_DERIVATIVE_FRACTION * self.config.bounds.r_min,
            max_on_inner_sphere=max_inner,
            min_on_outer_sphere=min_outer,
            level=self.config.level,
            samples=count,
        )


def _unit_directions(dim, n):
    if dim == 1:
        return np.array([[-1.0], [1.0]])
    if dim == 2:
        t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        return np.stack([np.cos(t), np.sin(t)], axis=-1)
    from .norm import icosphere_directions

    pts = icosphere_directions(1)
    return pts[:: max(1, len(pts) // n)]
