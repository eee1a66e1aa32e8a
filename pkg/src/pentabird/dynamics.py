"""The diagonal maps D_m and Delta_k, orbits, and collapse-point estimation.

Conventions
-----------
``d_map(P, m)`` puts the diagonal through vertices i and i+m at index
``-m-i``.  With that labeling ``d_map(d_map(P, k+1), k)`` equals the direct
map up to a shift of one index (:data:`FACTORED_SHIFT`), which is verified
when the module is imported.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull

from .errors import DegenerateDiagonal, DegenerateMeet, NoConvergence, WrongN
from .polygon import LabeledPolygon, diameter, random_convex_ngon, signed_area, star_relabel
from .projective import (
    DEFAULT_TOL,
    ProjMap,
    Tolerance,
    affine,
    inertia_normalize,
    lift,
    normalize,
    projective_map_from_points,
)

# factored vertex m equals direct vertex m - FACTORED_SHIFT
FACTORED_SHIFT = 1
# for n = 3k+1: Delta_1(P^{*(-k)})_j equals (Delta_k P)^{*(-k)}_{j - STAR_SHIFT}
STAR_SHIFT = 1


def _with_orientation(P: LabeledPolygon, vertices, kind=None) -> LabeledPolygon:
    kind = kind or P.kind
    orientation = P.orientation
    if kind == "point" and np.all(np.abs(vertices[:, 2]) > 1e-12 * np.linalg.norm(vertices, axis=1)):
        xy = affine(vertices)
        if np.all(np.isfinite(xy)):
            orientation = 1 if signed_area(xy) >= 0 else -1
    return LabeledPolygon(vertices, kind, orientation)


def _checked_cross(a, b, err, tol: Tolerance, what: str):
    c = np.cross(a, b)
    bad = np.flatnonzero(np.linalg.norm(c, axis=1) < tol.eps_point_eq)
    if len(bad):
        raise err(what, int(bad[0]))
    return c


def d_map(P: LabeledPolygon, m: int, tol: Tolerance = DEFAULT_TOL) -> LabeledPolygon:
    """D_m: the polygon of m-diagonals, labeled so that index -m-i holds P_{i,i+m}."""
    n = P.n
    D = _checked_cross(P.vertices, P.rolled(m), DegenerateDiagonal, tol, f"degenerate {m}-diagonal")
    Q = D[(-m - np.arange(n)) % n]
    kind = "line" if P.kind == "point" else "point"
    return _with_orientation(P, normalize(Q, tol), kind)


def delta_k_direct(P: LabeledPolygon, k: int, tol: Tolerance = DEFAULT_TOL) -> LabeledPolygon:
    """Vertex j is the meet of P_{j,j+k+1} and P_{j+1,j-k}."""
    V = P.vertices
    l1 = _checked_cross(V, P.rolled(k + 1), DegenerateDiagonal, tol, f"degenerate {k + 1}-diagonal")
    l2 = _checked_cross(P.rolled(1), P.rolled(-k), DegenerateDiagonal, tol, f"degenerate {k + 1}-diagonal")
    X = _checked_cross(normalize(l1, tol), normalize(l2, tol), DegenerateMeet, tol, "diagonals coincide")
    return _with_orientation(P, normalize(X, tol))


delta_k = delta_k_direct


def delta_k_factored(P: LabeledPolygon, k: int, tol: Tolerance = DEFAULT_TOL) -> LabeledPolygon:
    return d_map(d_map(P, k + 1, tol), k, tol)


def delta_k_factored_inverse(P: LabeledPolygon, k: int, tol: Tolerance = DEFAULT_TOL) -> LabeledPolygon:
    return d_map(d_map(P, k, tol), k + 1, tol)


def delta_k_inverse(P: LabeledPolygon, k: int, tol: Tolerance = DEFAULT_TOL) -> LabeledPolygon:
    """Inverse of :func:`delta_k_direct`."""
    return delta_k_factored_inverse(P.shifted(-FACTORED_SHIFT), k, tol)


def conjugation_residual(P: LabeledPolygon, k: int) -> float:
    """Vertexwise gap between D_{k+1} Delta_k D_{k+1} and the inverse (factored forms)."""
    lhs = d_map(delta_k_factored(d_map(P, k + 1), k), k + 1)
    return lhs.distance(delta_k_factored_inverse(P, k))


def _self_check():
    P = random_convex_ngon(11, seed=2024)
    for k in (1, 2, 3):
        f = delta_k_factored(P, k)
        d = delta_k_direct(P, k)
        if f.distance(d.shifted(-FACTORED_SHIFT)) > 1e-9:
            raise RuntimeError("factored/direct index shift is inconsistent")


_self_check()


# orbits

def _renormalizer(V: np.ndarray, orientation: int) -> np.ndarray:
    """Projective map putting a small or flattened polygon into a round, unit-size frame.

    Four roughly evenly spaced vertices go to the points (+-1, 0), (0, +-1);
    the result is then inertia-normalized.  Falls back to inertia
    normalization alone if the four-point map would push a vertex across the
    line at infinity.
    """
    n = len(V)
    idx = [0, n // 4, n // 2, (3 * n) // 4]
    s = 1.0 if orientation >= 0 else -1.0
    square = lift(np.array([[1, 0], [0, s], [-1, 0], [0, -s]], dtype=float))
    M = np.eye(3)
    try:
        H = projective_map_from_points(V[idx], square)
        W = H.apply_points(V)
        if np.all(W[:, 2] > 0) or np.all(W[:, 2] < 0):
            M = H.matrix
    except (np.linalg.LinAlgError, ValueError):
        pass
    W = V @ M.T
    A = inertia_normalize(affine(W)).matrix
    G = A @ M
    return G / np.linalg.norm(G)


def _orbit_frames(P: LabeledPolygon, k: int, steps: int, renormalize: bool, backward: bool = False):
    """Yield (frame, frame-to-raw matrix, raw image of the previous frame, renormalizer).

    The frame is the renormalizer applied to the image.  The frame-to-raw
    matrix may become numerically singular once the raw iterate has shrunk
    below double precision; the renormalizers stay well conditioned.
    """
    F = P
    H = np.eye(3)
    G = np.eye(3)
    step = delta_k_inverse if backward else delta_k_direct
    if renormalize and F.is_affine():
        G = _renormalizer(F.vertices, F.orientation)
        F = _with_orientation(F, normalize(F.vertices @ G.T))
        H = np.linalg.inv(G)
        H /= np.linalg.norm(H)
    yield F, H, None, G
    for _ in range(steps):
        image = step(F, k)
        F = image
        G = np.eye(3)
        if renormalize and image.is_affine():
            G = _renormalizer(image.vertices, image.orientation)
            F = _with_orientation(image, normalize(image.vertices @ G.T))
            H = H @ np.linalg.inv(G)
            H /= np.linalg.norm(H)
        yield F, H, image, G


def raw_vertices(frame: LabeledPolygon, to_raw: np.ndarray) -> np.ndarray:
    return normalize(frame.vertices @ np.asarray(to_raw).T)


@dataclass(frozen=True)
class OrbitRecord:
    """Stored iterates.  ``frames[i]`` is the display copy of level ``levels[i]``.

    The raw iterate is the matrix ``to_raw[i]`` applied to the frame.
    ``renormalizers[i]`` took the raw image of the neighbouring frame (the
    previous one going forward, the next one going backward) to frame i.
    Without renormalization frames are the raw iterates and every matrix is
    the identity.
    """

    k: int
    levels: tuple
    frames: tuple
    to_raw: tuple
    renormalizers: tuple
    energies: np.ndarray
    diameters: np.ndarray
    souls: tuple
    soul_areas: np.ndarray
    error: str | None = None

    def raw(self, i: int) -> LabeledPolygon:
        F = self.frames[i]
        return _with_orientation(F, raw_vertices(F, self.to_raw[i]))

    def display_map(self, i: int) -> ProjMap:
        """Map from raw coordinates to the display frame."""
        return ProjMap(self.to_raw[i]).inverse()

    def reconstruction_residual(self) -> float:
        """Largest gap between a stored iterate and Delta_k of its predecessor.

        Compared in the later frame, where the coordinates are well conditioned.
        """
        worst = 0.0
        for i in range(len(self.levels) - 1):
            img = delta_k_direct(self.frames[i], self.k)
            if self.levels[i + 1] > 0:
                M = self.renormalizers[i + 1]
            else:
                M = np.linalg.inv(self.renormalizers[i])
            moved = LabeledPolygon(img.vertices @ M.T, img.kind)
            worst = max(worst, moved.distance(self.frames[i + 1]))
        return worst


def _level_data(F, H, k, with_souls):
    from .bird import ConvexRegion, soul
    from .energy import chi_k

    try:
        e = chi_k(F, k)
    except ArithmeticError:
        e = np.nan
    raw = raw_vertices(F, H)
    xy = affine(raw)
    diam = diameter(xy) if np.all(np.isfinite(xy)) and np.all(np.abs(raw[:, 2]) > 1e-12) else np.inf
    S, area = None, np.nan
    if with_souls and F.kind == "point" and F.is_affine():
        s = soul(F, k)
        S = ConvexRegion(affine(lift(s.vertices) @ H.T)) if not s.empty else s
        area = S.area
    return e, diam, S, area


def iterate(P: LabeledPolygon, k: int, l_min: int = 0, l_max: int = 10,
            renormalize: bool = True, with_souls: bool = True) -> OrbitRecord:
    """Orbit of P under Delta_k for levels l_min..l_max.

    A degeneracy stops the orbit; the partial record carries the message in
    ``error``.
    """
    if l_min > 0 or l_max < 0:
        raise ValueError("need l_min <= 0 <= l_max")
    rows = {}
    error = None
    for backward, steps in ((False, l_max), (True, -l_min)):
        try:
            for i, (F, H, _, G) in enumerate(_orbit_frames(P, k, steps, renormalize, backward)):
                lvl = -i if backward else i
                if lvl not in rows:
                    rows[lvl] = (F, H, G) + _level_data(F, H, k, with_souls)
        except ArithmeticError as exc:
            error = str(exc)
    levels = tuple(sorted(rows))
    cols = list(zip(*(rows[l] for l in levels)))
    return OrbitRecord(
        k=k,
        levels=levels,
        frames=tuple(cols[0]),
        to_raw=tuple(cols[1]),
        renormalizers=tuple(cols[2]),
        energies=np.array(cols[3], dtype=float),
        diameters=np.array(cols[4], dtype=float),
        souls=tuple(cols[5]),
        soul_areas=np.array(cols[6], dtype=float),
        error=error,
    )


# collapse

@dataclass(frozen=True)
class CollapseEstimate:
    point: np.ndarray
    radius: float
    iterations: int
    converged: bool
    nested: bool = True
    frame: LabeledPolygon | None = None
    to_raw: np.ndarray | None = None


def _hull_contains(hull_xy, pts, rel_tol=1e-9) -> bool:
    h = ConvexHull(hull_xy)
    scale = diameter(hull_xy)
    return bool(np.all(pts @ h.equations[:, :2].T + h.equations[:, 2] <= rel_tol * scale))


def collapse_estimate(P: LabeledPolygon, k: int, tol: float = 1e-9, max_iter: int = 500,
                      strict: bool = False) -> CollapseEstimate:
    """Iterate until the raw diameter drops below ``tol``.

    Returns the vertex centroid of the last iterate and its diameter.  Each
    iterate is checked to lie in the hull of the previous one (``nested``).
    With ``strict`` a failure to converge raises :class:`NoConvergence`.
    """
    nested = True
    last = None
    for it, (F, H, image, _) in enumerate(_orbit_frames(P, k, max_iter, True)):
        if image is not None and last is not None and last.is_affine() and image.is_affine():
            nested &= _hull_contains(last.xy, image.xy)
        raw = affine(raw_vertices(F, H))
        radius = diameter(raw)
        last = F
        if radius < tol:
            return CollapseEstimate(raw.mean(axis=0), radius, it, True, nested, F, H)
    if strict:
        raise NoConvergence(f"diameter {radius:.3g} after {max_iter} iterations")
    return CollapseEstimate(raw.mean(axis=0), radius, max_iter, False, nested, F, H)


# star relabeling

@dataclass(frozen=True)
class StarConjugacyReport:
    point_residual: float
    energy_residual: float
    passed: bool


def star_conjugacy_check(P: LabeledPolygon, k: int, steps: int = 1, tol: float = 1e-8) -> StarConjugacyReport:
    """Compare the Delta_1 orbit of P^{*(-k)} with the relabeled Delta_k orbit (n = 3k+1)."""
    from .energy import chi_k

    if P.n != 3 * k + 1:
        raise WrongN(f"star conjugacy needs n = 3k+1 = {3 * k + 1}, got {P.n}")
    Q = star_relabel(P, -k)
    A, B = Q, P
    worst = 0.0
    for s in range(1, steps + 1):
        A = delta_k_direct(A, 1)
        B = delta_k_direct(B, k)
        worst = max(worst, A.distance(star_relabel(B, -k).shifted(-s * STAR_SHIFT)))
    e = abs(chi_k(P, k) * chi_k(Q, 1) - 1.0)
    return StarConjugacyReport(worst, e, worst < 1e-9 and e < tol)


# backward orbit

def limit_line(P: LabeledPolygon, k: int, tol: float = 1e-12, max_iter: int = 500) -> np.ndarray:
    """Estimate the line the backward orbit accumulates on.

    Backward iteration is conjugate, through D_{k+1}, to forward iteration of
    the PolyLine of (k+1)-diagonals.  After moving a soul point to the
    origin, that PolyLine read as a polygon of dual points collapses, and its
    collapse point is the limit line.
    """
    from .bird import soul

    S = soul(P, k)
    c = S.interior_point()
    T = ProjMap.affine(np.eye(2), -c)
    moved = LabeledPolygon(T.apply_points(P.vertices), P.kind, P.orientation)
    dual = d_map(moved, k + 1)
    as_points = _with_orientation(dual, dual.vertices, "point")
    est = collapse_estimate(as_points, k, tol=tol, max_iter=max_iter)
    L = lift(est.point)
    return normalize(T.matrix.T @ L)


def limit_line_chart(P: LabeledPolygon, k: int, line=None) -> ProjMap:
    """Projective chart sending the backward limit line to infinity and a soul point to 0."""
    from .bird import soul

    L = limit_line(P, k) if line is None else np.asarray(line, dtype=float)
    c = lift(soul(P, k).interior_point())
    L = L / (L @ c)
    return ProjMap(np.array([[1, 0, -c[0]], [0, 1, -c[1]], L]))


@dataclass(frozen=True)
class ExhaustionReport:
    steps: int
    inradius: float
    reached: bool
    chart_ok: bool
    inradii: tuple = field(default=())


def backward_exhaustion_probe(P: LabeledPolygon, k: int, radius: float = 1e3,
                              max_steps: int = 200) -> ExhaustionReport:
    """Iterate backward in the limit-line chart until the hull holds a disk of ``radius``.

    The disk is centered at the chart origin (a soul point of P).
    """
    chart = limit_line_chart(P, k)
    X = LabeledPolygon(chart.apply_points(P.vertices), P.kind, P.orientation)
    radii = []
    r = 0.0
    for s in range(max_steps + 1):
        if not X.is_affine():
            return ExhaustionReport(s, r, False, False, tuple(radii))
        xy = X.xy
        h = ConvexHull(xy)
        off = h.equations[:, 2]
        r = float(-off.max()) if np.all(off < 0) else 0.0
        radii.append(r)
        if r >= radius:
            return ExhaustionReport(s, r, True, True, tuple(radii))
        X = delta_k_inverse(X, k)
    return ExhaustionReport(max_steps, r, False, True, tuple(radii))
