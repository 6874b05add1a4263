"""Asymmetric-norm predicates, sphere bounds and radial growth-rate checks.

Bounds r_max / r_min are the max and min of F over the Euclidean unit sphere
(over the chart closure as well for chart fields).  They fix every constant
of the smoothing pipeline, so the sphere sampling is dense with a local
refinement pass around the extrema.  All predicates are sampled, not proven.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import findiff
from .errors import NotANormError
from .structures import FinslerField

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class AsymmetricNormField:
    """A candidate asymmetric norm y -> F(y) on R^dim, batched evaluation."""

    dim: int
    eval_fn: Callable
    claims_symmetric: bool = False
    claims_smooth_away_from_0: bool = False

    def __call__(self, Y):
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        return np.asarray(self.eval_fn(Y), dtype=float)

    def eval(self, y):
        return float(self(np.asarray(y, dtype=float)[None, :])[0])


@dataclass(frozen=True)
class NormBounds:
    """Sphere max / min of F: r_M, r_m of the growth-rate analysis (r_U, r_u per chart)."""

    r_max: float
    r_min: float

    def __post_init__(self):
        if self.r_min <= 0 or self.r_max <= 0:
            raise NotANormError("sphere bounds must be positive")
        if self.r_min > self.r_max * (1 + 1e-12):
            raise ValueError("r_min must not exceed r_max")

    @property
    def ratio(self):
        return self.r_max / self.r_min


def circle_directions(n):
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    return np.stack([np.cos(t), np.sin(t)], axis=-1)


def icosphere_directions(level=3):
    """Vertices of a subdivided icosahedron projected to the unit sphere."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    verts = []
    for a in (-1.0, 1.0):
        for b in (-phi, phi):
            verts += [(0.0, a, b), (a, b, 0.0), (b, 0.0, a)]
    verts = [np.array(v) / np.linalg.norm(v) for v in verts]
    faces = []
    for i in range(len(verts)):
        for j in range(i + 1, len(verts)):
            for k in range(j + 1, len(verts)):
                d = sorted([np.linalg.norm(verts[i] - verts[j]),
                            np.linalg.norm(verts[j] - verts[k]),
                            np.linalg.norm(verts[i] - verts[k])])
                if d[2] < 1.2:  # edge length of the unit icosahedron is ~1.05
                    faces.append((i, j, k))
    points = {tuple(np.round(v, 12)) for v in verts}
    tri = [(verts[i], verts[j], verts[k]) for i, j, k in faces]
    for _ in range(level):
        new_tri = []
        for a, b, c in tri:
            ab = (a + b) / np.linalg.norm(a + b)
            bc = (b + c) / np.linalg.norm(b + c)
            ca = (c + a) / np.linalg.norm(c + a)
            for v in (ab, bc, ca):
                points.add(tuple(np.round(v, 12)))
            new_tri += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
        tri = new_tri
    return np.array(sorted(points))


def sphere_directions(dim, n_angles=720, level=3):
    if dim == 1:
        return np.array([[-1.0], [1.0]])
    if dim == 2:
        return circle_directions(n_angles)
    if dim == 3:
        return icosphere_directions(level)
    raise ValueError("sphere sampling supports dimensions 1-3")


def _refine_circle_extremum(f, t0, dt, maximize, iters=60):
    """Golden-section refinement of f(angle) on [t0-dt, t0+dt]."""
    a, b = t0 - dt, t0 + dt
    sign = 1.0 if maximize else -1.0
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = sign * f(c), sign * f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = sign * f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = sign * f(d)
    t = 0.5 * (a + b)
    return sign * max(fc, fd), t


def _bounds_for_norm(norm, n_angles, level, refine):
    dirs = sphere_directions(norm.dim, n_angles, level)
    vals = norm(dirs)
    if np.any(vals <= 0.0) or not np.all(np.isfinite(vals)):
        raise NotANormError("norm candidate is nonpositive on the sampled unit sphere")
    r_max = float(np.max(vals))
    r_min = float(np.min(vals))
    if not refine:
        return r_max, r_min
    if norm.dim == 2:
        dt = 2.0 * np.pi / len(dirs)
        f = lambda t: float(norm(np.array([[math.cos(t), math.sin(t)]]))[0])
        i_max = int(np.argmax(vals))
        i_min = int(np.argmin(vals))
        v_max, _ = _refine_circle_extremum(f, 2.0 * np.pi * i_max / len(dirs), dt, True)
        v_min, _ = _refine_circle_extremum(f, 2.0 * np.pi * i_min / len(dirs), dt, False)
        r_max = max(r_max, v_max)
        r_min = min(r_min, v_min)
    elif norm.dim == 3:
        for maximize in (True, False):
            idx = int(np.argmax(vals)) if maximize else int(np.argmin(vals))
            best_dir = dirs[idx]
            best = vals[idx]
            radius = 0.2
            rng_offsets = sphere_directions(3, level=1)
            for _ in range(24):
                cand = best_dir[None, :] + radius * rng_offsets
                cand /= np.linalg.norm(cand, axis=1, keepdims=True)
                cvals = norm(cand)
                j = int(np.argmax(cvals)) if maximize else int(np.argmin(cvals))
                if (maximize and cvals[j] > best) or (not maximize and cvals[j] < best):
                    best = float(cvals[j])
                    best_dir = cand[j]
                else:
                    radius *= 0.5
            if maximize:
                r_max = max(r_max, best)
            else:
                r_min = min(r_min, best)
    return r_max, r_min


def compute_bounds(field, n_angles=720, level=3, refine=True, x_counts=9):
    """NormBounds of a norm candidate, or of a chart field over the box closure."""
    if isinstance(field, AsymmetricNormField):
        r_max, r_min = _bounds_for_norm(field, n_angles, level, refine)
        return NormBounds(r_max=r_max, r_min=r_min)
    if isinstance(field, FinslerField):
        if field.x_independent:
            xs = [field.domain.center]
        else:
            xs = field.domain.grid(x_counts)
        r_max, r_min = -np.inf, np.inf
        for x in np.atleast_2d(xs):
            m, mn = _bounds_for_norm(field.norm_at(x), n_angles, level, refine)
            r_max = max(r_max, m)
            r_min = min(r_min, mn)
        return NormBounds(r_max=float(r_max), r_min=float(r_min))
    raise TypeError("compute_bounds expects an AsymmetricNormField or FinslerField")


@dataclass(frozen=True)
class GrowthReport:
    """Outcome of the radial growth-rate inequality at one admissible sample."""

    gap: float
    threshold: float
    satisfied: bool
    admissible: bool
    max_offset: float


def check_growth_bound(norm, v, w, t, bounds):
    """Gap F(w + t*v/|v|) - F(w) against the (r_min/8)*t lower bound.

    The admissibility condition |w - v| <= r_min*|v| / (4*n*r_max) mirrors the
    hypothesis of the growth lemma; violations are reported, not raised.
    """
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    t = float(t)
    nv = float(np.linalg.norm(v))
    if nv == 0.0 or t <= 0.0:
        raise ValueError("need a nonzero direction v and t > 0")
    n = norm.dim
    max_offset = bounds.r_min * nv / (4.0 * n * bounds.r_max)
    admissible = float(np.linalg.norm(w - v)) <= max_offset * (1 + 1e-12)
    gap = norm.eval(w + t * v / nv) - norm.eval(w)
    threshold = bounds.r_min / 8.0 * t
    return GrowthReport(gap=gap, threshold=threshold, satisfied=gap > threshold,
                        admissible=admissible, max_offset=max_offset)


class MinkowskiVerdict(enum.Enum):
    POSITIVE_DEFINITE = "positive_definite"
    INDETERMINATE = "indeterminate"
    NOT_POSITIVE_DEFINITE = "not_positive_definite"


@dataclass(frozen=True)
class MinkowskiReport:
    min_eigenvalue: float
    eigenvalues: np.ndarray
    tolerance: float
    verdict: MinkowskiVerdict

    @property
    def is_positive_definite(self):
        return self.verdict is MinkowskiVerdict.POSITIVE_DEFINITE


def check_minkowski(norm, y, h=None, rel_tol=1e-6):
    """Finite-difference Hessian of F^2 at y with a scale-free definiteness verdict.

    The threshold is rel_tol * trace/n; eigenvalues inside the band are
    reported indeterminate (degenerate within finite-difference noise).
    """
    y = np.asarray(y, dtype=float)
    if np.linalg.norm(y) == 0.0:
        raise ValueError("Minkowski check needs y != 0")
    if h is None:
        h = max(1e-3, 1e-2 * float(np.linalg.norm(y)))

    def f_sq(Y):
        vals = norm(Y)
        return vals * vals

    H = findiff.hessian(f_sq, y, h)
    eigs = np.linalg.eigvalsh(0.5 * (H + H.T))
    tol = rel_tol * max(abs(np.trace(H)) / norm.dim, 1e-12)
    min_eig = float(eigs[0])
    if min_eig > tol:
        verdict = MinkowskiVerdict.POSITIVE_DEFINITE
    elif min_eig < -tol:
        verdict = MinkowskiVerdict.NOT_POSITIVE_DEFINITE
    else:
        verdict = MinkowskiVerdict.INDETERMINATE
    return MinkowskiReport(min_eigenvalue=min_eig, eigenvalues=eigs, tolerance=tol,
                           verdict=verdict)
