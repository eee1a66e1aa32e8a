"""Lift-invariant 3x3 operators attached to a polygon, and collapse-point checks.

G_{P,a,b}(v) = sum_i det(P_{i-a}, v, P_{i+b}) / det(P_{i-a}, P_i, P_{i+b}) * P_i
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import collapse_estimate, delta_k_direct
from .errors import DegenerateTriple, ParamError, WrongN
from .polygon import LabeledPolygon
from .projective import DEFAULT_TOL, Tolerance, lift


@dataclass(frozen=True, eq=False)
class GlickOperator:
    matrix: np.ndarray
    a: int
    b: int
    n: int

    def __call__(self, v) -> np.ndarray:
        return self.matrix @ np.asarray(v, dtype=float)

    def shifted_form(self) -> np.ndarray:
        """n I - G, the form used in the pentagram literature."""
        return self.n * np.eye(3) - self.matrix


def glick_operator(P: LabeledPolygon, a: int, b: int, lifts=None, tol: Tolerance = DEFAULT_TOL) -> GlickOperator:
    V = np.asarray(P.vertices if lifts is None else lifts, dtype=float)
    before = np.roll(V, a, axis=0)   # row i: V_{i-a}
    after = np.roll(V, -b, axis=0)   # row i: V_{i+b}
    w = np.cross(after, before)      # det(V_{i-a}, v, V_{i+b}) = w_i . v
    d = np.sum(w * V, axis=1)
    scale = np.linalg.norm(before, axis=1) * np.linalg.norm(V, axis=1) * np.linalg.norm(after, axis=1)
    bad = np.flatnonzero(np.abs(d) <= tol.eps_det * scale)
    if len(bad):
        raise DegenerateTriple(f"vertices i-{a}, i, i+{b} are collinear", int(bad[0]))
    G = np.einsum("ij,ik->jk", V / d[:, None], w)
    return GlickOperator(G, a, b, P.n)


def invariant_parameters(n: int, k: int):
    """(a, b) for which G_{P,a,b} is Delta_k-invariant, or None."""
    if n == 3 * k + 1:
        return k, k
    if n == 3 * k + 2:
        return k + 1, k + 1
    if k == 1:
        return 1, 1
    return None


def projective_residual(A, B) -> tuple:
    """min over scalars lam of |A - lam B| / |A|, with the minimizing lam."""
    A, B = np.asarray(A, float), np.asarray(B, float)
    lam = float(np.sum(A * B) / np.sum(B * B))
    return float(np.linalg.norm(A - lam * B) / np.linalg.norm(A)), lam


@dataclass(frozen=True)
class InvarianceReport:
    a: int
    b: int
    residual: float
    scale: float
    passed: bool


def glick_invariance_check(P: LabeledPolygon, k: int, tol: float = 1e-8) -> InvarianceReport:
    ab = invariant_parameters(P.n, k)
    if ab is None:
        raise WrongN(f"no invariant operator known for n={P.n}, k={k}")
    a, b = ab
    G0 = glick_operator(P, a, b).matrix
    G1 = glick_operator(delta_k_direct(P, k), a, b).matrix
    res, lam = projective_residual(G1, G0)
    return InvarianceReport(a, b, res, lam, res < tol)


def fixed_point_residual(G, v) -> float:
    """How far v is from an eigenvector of G, relative to |G| |v|."""
    G = np.asarray(G, float)
    v = np.asarray(v, float)
    Gv = G @ v
    ray = (v @ Gv) / (v @ v)
    return float(np.linalg.norm(Gv - ray * v) / (np.linalg.norm(G) * np.linalg.norm(v)))


@dataclass(frozen=True)
class FixedPointReport:
    a: int
    b: int
    point: np.ndarray
    residual: float
    radius: float
    converged: bool
    iterations: int


def collapse_fixed_point_check(P: LabeledPolygon, k: int, tol: float = 1e-10, max_iter: int = 500) -> FixedPointReport:
    """Residual of the collapse point as a projective fixed point of the invariant operator."""
    ab = invariant_parameters(P.n, k)
    if ab is None:
        raise WrongN(f"fixed-point check needs n = 3k+1, n = 3k+2 or k = 1 (n={P.n}, k={k})")
    a, b = ab
    est = collapse_estimate(P, k, tol=tol, max_iter=max_iter)
    G = glick_operator(P, a, b).matrix
    return FixedPointReport(a, b, est.point, fixed_point_residual(G, lift(est.point)),
                            est.radius, est.converged, est.iterations)


@dataclass(frozen=True)
class SurveyReport:
    n: int
    ks: tuple
    points: np.ndarray
    radii: np.ndarray
    collinearity: float
    operator_residuals: dict = field(default_factory=dict)


def multi_k_collapse_survey(P: LabeledPolygon, tol: float = 1e-10, max_iter: int = 500,
                            grid=(1, 2, 3)) -> SurveyReport:
    """Collapse points of Delta_1 .. Delta_beta (3 beta + 1 <= n) and their collinearity.

    For k with n > 3k+2 no invariant operator is known; residuals of the
    collapse point against G_{P,a,b} on a small (a, b) grid are recorded as data.
    """
    n = P.n
    if n < 7:
        raise ParamError("survey needs n >= 7")
    beta = (n - 1) // 3
    ks = tuple(range(1, beta + 1))
    pts, radii, extra = [], [], {}
    for k in ks:
        est = collapse_estimate(P, k, tol=tol, max_iter=max_iter)
        pts.append(est.point)
        radii.append(est.radius)
        if invariant_parameters(n, k) is None:
            for a in grid:
                for b in grid:
                    try:
                        G = glick_operator(P, a, b).matrix
                    except DegenerateTriple:
                        continue
                    extra[(k, a, b)] = fixed_point_residual(G, lift(est.point))
    pts = np.array(pts)
    c = pts - pts.mean(axis=0)
    if len(pts) >= 3:
        _, _, vt = np.linalg.svd(c)
        collinearity = float(np.abs(c @ vt[1]).max())
    else:
        collinearity = 0.0
    return SurveyReport(n, ks, pts, np.array(radii), collinearity, extra)
