"""Homogeneous-coordinate primitives for the real projective plane.

Points and lines are both stored as 3-vectors; which one a vector means is
decided by context (the ``kind`` of the polygon holding it).  Functions here
accept either single vectors of shape ``(3,)`` or stacks of shape ``(n, 3)``
wherever that is natural.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CoincidentLines,
    CrossRatioPole,
    DegenerateInertia,
    DegenerateJoin,
    DegenerateMeet,
    NotConcurrent,
    ParamError,
)


@dataclass(frozen=True)
class Tolerance:
    eps_collinear: float = 1e-10
    eps_point_eq: float = 1e-9
    eps_det: float = 1e-12

    def __post_init__(self):
        if min(self.eps_collinear, self.eps_point_eq, self.eps_det) <= 0:
            raise ParamError("tolerances must be strictly positive")


DEFAULT_TOL = Tolerance()


def normalize(v, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Scale to unit norm with a deterministic sign.

    The sign makes the third coordinate positive when it is nonzero, so that
    affine points keep their natural ``w > 0`` lift; otherwise the first
    nonzero coordinate is made positive.
    """
    v = np.asarray(v, dtype=float)
    norms = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(norms == 0):
        raise DegenerateJoin("zero homogeneous vector")
    # leave unit vectors untouched so that normalizing twice is exact
    u = np.where(np.abs(norms - 1) <= 4e-16, v, v / norms)
    w = u[..., 2]
    lead = np.where(np.abs(u[..., 0]) > tol.eps_det, u[..., 0], u[..., 1])
    sign = np.where(np.abs(w) > tol.eps_det, np.sign(w), np.sign(lead))
    sign = np.where(sign == 0, 1.0, sign)
    return u * sign[..., None]


def lift(xy) -> np.ndarray:
    """Affine points ``(x, y)`` to homogeneous ``(x, y, 1)``."""
    xy = np.asarray(xy, dtype=float)
    return np.concatenate([xy, np.ones(xy.shape[:-1] + (1,))], axis=-1)


def affine(v) -> np.ndarray:
    """Homogeneous points to affine coordinates (points at infinity give inf)."""
    v = np.asarray(v, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return v[..., :2] / v[..., 2:3]


def is_affine(v, tol: Tolerance = DEFAULT_TOL):
    u = normalize(v, tol)
    return np.abs(u[..., 2]) > tol.eps_point_eq


def same_point(p, q, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Projective equality: the unit vectors agree up to sign."""
    return float(np.linalg.norm(np.cross(normalize(p, tol), normalize(q, tol)))) < tol.eps_point_eq


def join(p, q, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Line through two points."""
    p = normalize(p, tol)
    q = normalize(q, tol)
    l = np.cross(p, q)
    bad = np.linalg.norm(l, axis=-1) < tol.eps_point_eq
    if np.any(bad):
        idx = int(np.flatnonzero(np.atleast_1d(bad))[0]) if l.ndim > 1 else None
        raise DegenerateJoin("points coincide", idx)
    return normalize(l, tol)


def meet(l, m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Intersection point of two lines (possibly at infinity)."""
    l = normalize(l, tol)
    m = normalize(m, tol)
    p = np.cross(l, m)
    bad = np.linalg.norm(p, axis=-1) < tol.eps_point_eq
    if np.any(bad):
        idx = int(np.flatnonzero(np.atleast_1d(bad))[0]) if p.ndim > 1 else None
        raise DegenerateMeet("lines coincide", idx)
    return normalize(p, tol)


def incidence(p, l) -> np.ndarray:
    """|p . l| for unit-normalized inputs; zero iff the point lies on the line."""
    return np.abs(np.sum(normalize(p) * normalize(l), axis=-1))


def cross_ratio(a: float, b: float, c: float, d: float, tol: Tolerance = DEFAULT_TOL) -> float:
    den = (a - c) * (b - d)
    scale = max(1.0, abs(a), abs(b), abs(c), abs(d)) ** 2
    if abs(den) <= tol.eps_det * scale:
        raise CrossRatioPole("a = c or b = d")
    return (a - b) * (c - d) / den


def bracket(x, y, t) -> np.ndarray:
    """Signed coordinate difference of two points on the line ``t``.

    For points on a common line this is a nondegenerate antisymmetric form,
    so it plays the role of ``a - b`` in the cross ratio.
    """
    return np.sum(np.cross(x, y) * t, axis=-1)


def collinear_cross_ratio(a, b, c, d, line) -> np.ndarray:
    """Cross ratio of four points on ``line`` in the (a-b)(c-d)/((a-c)(b-d)) convention."""
    return bracket(a, b, line) * bracket(c, d, line) / (bracket(a, c, line) * bracket(b, d, line))


def pencil_cross_ratio(lines, center=None, tol: Tolerance = DEFAULT_TOL) -> float:
    """Cross ratio of four concurrent lines.

    The pencil is cut by a transversal and the cross ratio of the four
    collinear intersection points is returned.  The transversal is the line
    whose coordinates equal those of the center; it never passes through the
    center, so no slope can be singular.  The result equals the cross ratio of
    the slopes whenever those are finite.
    """
    L = normalize(np.asarray(lines, dtype=float).reshape(4, 3), tol)
    if center is None:
        _, s, vt = np.linalg.svd(L)
        if s[1] < tol.eps_point_eq:
            raise CoincidentLines("all four lines coincide")
        center = vt[-1]
        if s[2] / s[0] > tol.eps_collinear * 10:
            raise NotConcurrent(f"concurrency residual {s[2] / s[0]:.3g}")
    else:
        center = normalize(center, tol)
        res = np.abs(L @ center).max()
        if res > tol.eps_collinear * 10:
            raise NotConcurrent(f"concurrency residual {res:.3g}")
    for i in range(4):
        for j in range(i + 1, 4):
            if np.linalg.norm(np.cross(L[i], L[j])) < tol.eps_point_eq:
                raise CoincidentLines(f"lines {i} and {j} coincide")
    t = center
    X = np.cross(L, t)
    num = bracket(X[0], X[1], t) * bracket(X[2], X[3], t)
    den = bracket(X[0], X[2], t) * bracket(X[1], X[3], t)
    if abs(den) <= tol.eps_det * max(abs(num), 1e-300):
        raise CrossRatioPole("degenerate pencil")
    return float(num / den)


def slope(line) -> float:
    """Slope of the line a x + b y + c = 0 (inf for vertical lines)."""
    a, b, _ = np.asarray(line, dtype=float)
    return -a / b if b != 0 else np.inf


def slope_cross_ratio(lines) -> float:
    """Cross ratio of the slopes of four lines, as written with raw slopes."""
    s = [slope(l) for l in lines]
    return cross_ratio(*s)


@dataclass(frozen=True)
class ProjMap:
    """Invertible 3x3 matrix acting on points by M v and on lines by M^-T l."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (3, 3):
            raise ParamError("ProjMap needs a 3x3 matrix")
        scale = np.abs(m).max()
        if scale == 0 or abs(np.linalg.det(m / scale)) < DEFAULT_TOL.eps_det:
            raise ParamError("ProjMap matrix is singular")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> "ProjMap":
        return cls(np.eye(3))

    @classmethod
    def affine(cls, linear, translation) -> "ProjMap":
        m = np.eye(3)
        m[:2, :2] = linear
        m[:2, 2] = translation
        return cls(m)

    @classmethod
    def random(cls, rng, spread: float = 0.3) -> "ProjMap":
        """A random map close enough to the identity to keep a unit-size figure affine."""
        while True:
            m = np.eye(3) + spread * rng.normal(size=(3, 3))
            m[2] *= 0.5
            m[2, 2] = 1.0
            if abs(np.linalg.det(m)) > 0.1:
                return cls(m)

    def apply_points(self, v) -> np.ndarray:
        return np.asarray(v, dtype=float) @ self.matrix.T

    def apply_lines(self, v) -> np.ndarray:
        return np.asarray(v, dtype=float) @ np.linalg.inv(self.matrix)

    def apply_affine(self, xy) -> np.ndarray:
        return affine(self.apply_points(lift(xy)))

    def compose(self, other: "ProjMap") -> "ProjMap":
        """self after other."""
        return ProjMap(self.matrix @ other.matrix)

    def inverse(self) -> "ProjMap":
        return ProjMap(np.linalg.inv(self.matrix))

    def is_affine(self) -> bool:
        m = self.matrix
        return bool(abs(m[2, 0]) + abs(m[2, 1]) <= 1e-14 * abs(m[2, 2]))


def projective_map_from_points(src, dst) -> ProjMap:
    """The map sending four points in general position to four others."""
    def frame(q):
        q = np.asarray(q, dtype=float)
        m = q[:3].T
        lam = np.linalg.solve(m, q[3])
        return m * lam

    return ProjMap(frame(dst) @ np.linalg.inv(frame(src)))


def inertia_normalize(points, tol: Tolerance = DEFAULT_TOL) -> ProjMap:
    """Affine map taking the centroid to 0 and the vertex covariance to the identity.

    ``points`` are affine ``(x, y)`` pairs.  The linear part is the symmetric
    inverse square root of the covariance, so a set that is already
    normalized yields the identity.
    """
    pts = np.asarray(points, dtype=float)
    if len(pts) < 3:
        raise DegenerateInertia("need at least three points")
    c = pts.mean(axis=0)
    cov = (pts - c).T @ (pts - c) / len(pts)
    w, v = np.linalg.eigh(cov)
    if w[0] <= tol.eps_collinear * max(w[1], 1e-300) or w[1] <= 0:
        raise DegenerateInertia(f"points are collinear (eigenvalues {w[0]:.3g}, {w[1]:.3g})")
    s = v @ np.diag(w ** -0.5) @ v.T
    return ProjMap.affine(s, -s @ c)
