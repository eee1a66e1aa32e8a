"""Labeled cyclic polygons in the projective plane and predicates on them."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .errors import (
    BadN,
    DegenerateDiagonal,
    NotCoprime,
    NotEmbedded,
    ParamError,
    PathStartNotRegular,
    PointOnBoundary,
)
from .projective import (
    DEFAULT_TOL,
    Tolerance,
    affine,
    lift,
    normalize,
    projective_map_from_points,
)

KINDS = ("point", "line")

# angular tolerance (radians) for parallel / coincident classification
ANGLE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class LabeledPolygon:
    """Cyclically indexed PolyPoint or PolyLine.

    ``vertices`` is an ``(n, 3)`` array of canonical unit vectors.  Index
    arithmetic is always mod n; use :meth:`vertex` or :meth:`rolled` rather
    than indexing ``vertices`` with unreduced indices.
    """

    vertices: np.ndarray
    kind: str = "point"
    orientation: int = 1

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ParamError("vertices must have shape (n, 3)")
        if len(v) < 3:
            raise BadN(f"need n >= 3, got {len(v)}")
        if self.kind not in KINDS:
            raise ParamError(f"kind must be one of {KINDS}")
        if self.orientation not in (1, -1):
            raise ParamError("orientation must be +1 or -1")
        v = normalize(v)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def from_xy(cls, xy, kind="point", orientation=None) -> "LabeledPolygon":
        xy = np.asarray(xy, dtype=float)
        if orientation is None:
            orientation = 1 if signed_area(xy) >= 0 else -1
        return cls(lift(xy), kind, orientation)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def xy(self) -> np.ndarray:
        return affine(self.vertices)

    def vertex(self, i: int) -> np.ndarray:
        return self.vertices[i % self.n]

    def rolled(self, s: int) -> np.ndarray:
        """Array whose row j is vertex j + s."""
        return np.roll(self.vertices, -s, axis=0)

    def shifted(self, s: int) -> "LabeledPolygon":
        """Relabel so that new vertex j is old vertex j + s."""
        return LabeledPolygon(self.rolled(s), self.kind, self.orientation)

    def with_vertices(self, vertices, kind=None) -> "LabeledPolygon":
        return LabeledPolygon(vertices, kind or self.kind, self.orientation)

    def is_affine(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return bool(np.all(np.abs(self.vertices[:, 2]) > tol.eps_point_eq))

    def distance(self, other: "LabeledPolygon") -> float:
        """Largest vertexwise projective distance (sine of angle between lifts)."""
        if other.n != self.n:
            return np.inf
        return float(np.linalg.norm(np.cross(self.vertices, other.vertices), axis=1).max())

    def __repr__(self):
        return f"LabeledPolygon(kind={self.kind!r}, n={self.n}, orientation={self.orientation})"


def as_xy(P) -> np.ndarray:
    return P.xy if isinstance(P, LabeledPolygon) else np.asarray(P, dtype=float)


def signed_area(xy) -> float:
    xy = np.asarray(xy, dtype=float)
    x, y = xy[:, 0], xy[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def diameter(xy) -> float:
    xy = np.asarray(xy, dtype=float)
    d = xy[:, None, :] - xy[None, :, :]
    return float(np.sqrt((d ** 2).sum(-1)).max())


# generators

def regular_ngon(n: int) -> LabeledPolygon:
    if n < 3:
        raise BadN(f"need n >= 3, got {n}")
    a = 2 * np.pi * np.arange(n) / n
    return LabeledPolygon.from_xy(np.column_stack([np.cos(a), np.sin(a)]), orientation=1)


def is_strictly_convex(xy, margin: float = 1e-9) -> bool:
    xy = np.asarray(xy, dtype=float)
    e = np.roll(xy, -1, axis=0) - xy
    turn = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
    total = np.sum(np.arctan2(turn, np.sum(e * np.roll(e, -1, axis=0), axis=1)))
    return bool(np.all(turn > margin) and abs(total - 2 * np.pi) < 1e-6)


def random_convex_ngon(n: int, seed=None) -> LabeledPolygon:
    """Strictly convex counter-clockwise n-gon, deterministic per seed.

    Vertices are jittered around a circle and then pushed through a random
    area-preserving-ish affine map, so the result is generic but well
    conditioned.
    """
    if n < 3:
        raise BadN(f"need n >= 3, got {n}")
    rng = np.random.default_rng(seed)
    radial = 0.1
    while True:
        a = 2 * np.pi * (np.arange(n) + rng.uniform(-0.3, 0.3, n)) / n
        r = 1 + rng.uniform(-radial, radial, n)
        xy = np.column_stack([r * np.cos(a), r * np.sin(a)])
        th, ph = rng.uniform(0, 2 * np.pi, 2)
        rot = lambda t: np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
        lin = rot(th) @ np.diag([1.0, rng.uniform(0.5, 1.0)]) @ rot(ph)
        xy = xy @ lin.T + rng.uniform(-0.5, 0.5, 2)
        if is_strictly_convex(xy):
            return LabeledPolygon.from_xy(xy, orientation=1)
        radial /= 2


# diagonals

def diagonals(P: LabeledPolygon, m: int, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Row i is the diagonal joining vertices i and i + m (join or meet by kind)."""
    d = np.cross(P.vertices, P.rolled(m))
    norms = np.linalg.norm(d, axis=1)
    bad = np.flatnonzero(norms < tol.eps_point_eq)
    if len(bad):
        raise DegenerateDiagonal(f"vertices {bad[0]} and {(bad[0] + m) % P.n} coincide", int(bad[0]))
    return normalize(d, tol)


def diagonal(P: LabeledPolygon, a: int, b: int, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Line through vertices a and b (for a PolyLine: the meet of lines a and b)."""
    d = np.cross(P.vertex(a), P.vertex(b))
    if np.linalg.norm(d) < tol.eps_point_eq:
        raise DegenerateDiagonal(f"vertices {a % P.n} and {b % P.n} coincide", a % P.n)
    return normalize(d, tol)


def dualize(P: LabeledPolygon) -> LabeledPolygon:
    """Orthogonal-complement duality: same coordinates, kind flipped."""
    return LabeledPolygon(P.vertices, "line" if P.kind == "point" else "point", P.orientation)


def star_relabel(P: LabeledPolygon, r: int) -> LabeledPolygon:
    """Vertex j of the result is vertex r*j of P."""
    n = P.n
    if gcd(r % n, n) != 1:
        raise NotCoprime(f"gcd({r}, {n}) != 1")
    idx = (r * np.arange(n)) % n
    return LabeledPolygon(P.vertices[idx], P.kind, P.orientation)


def cyclic_cover(P: LabeledPolygon, m: int) -> LabeledPolygon:
    if m < 1:
        raise ParamError("cover multiplicity must be >= 1")
    return LabeledPolygon(np.tile(P.vertices, (m, 1)), P.kind, P.orientation)


# niceness

@dataclass(frozen=True)
class NicenessFailure:
    vertex: int | None
    reason: str
    residual: float


@dataclass(frozen=True)
class NicenessReport:
    ok: bool
    failures: tuple = ()


def nice_offsets(k: int):
    return (-k - 1, -k, k, k + 1)


def is_planar(P: LabeledPolygon, n_random: int = 60, seed: int = 0, tol: Tolerance = DEFAULT_TOL):
    """Search for a line missing every closed edge.

    Edges are the segments between consecutive stored lifts, so a line misses
    them all iff it takes the same strict sign on every vertex.  Returns the
    witness line or None.
    """
    V = P.vertices
    cands = [np.eye(3)[2], np.eye(3)[0], np.eye(3)[1]]
    cands += list(np.random.default_rng(seed).normal(size=(n_random, 3)))
    for L in cands:
        s = V @ (L / np.linalg.norm(L))
        if np.all(s > tol.eps_point_eq) or np.all(s < -tol.eps_point_eq):
            return L / np.linalg.norm(L)
    return None


def is_k_nice(P: LabeledPolygon, k: int, angle_tol: float = ANGLE_TOL) -> NicenessReport:
    failures = []
    if not P.n > 3 * k:
        failures.append(NicenessFailure(None, f"n={P.n} <= 3k={3 * k}", 0.0))
    if is_planar(P) is None:
        failures.append(NicenessFailure(None, "non-planar", 0.0))
    offs = nice_offsets(k)
    V = P.vertices
    lines = [np.cross(V, P.rolled(o)) for o in offs]
    for a in range(4):
        for b in range(a + 1, 4):
            la, lb = lines[a], lines[b]
            na = np.linalg.norm(la, axis=1)
            nb = np.linalg.norm(lb, axis=1)
            with np.errstate(divide="ignore", invalid="ignore"):
                sep = np.linalg.norm(np.cross(la, lb), axis=1) / (na * nb)
            sep = np.where((na < 1e-15) | (nb < 1e-15), 0.0, sep)
            for i in np.flatnonzero(~(sep > angle_tol)):
                failures.append(NicenessFailure(
                    int(i), f"P[i,i{offs[a]:+d}] = P[i,i{offs[b]:+d}]", float(sep[i])))
    return NicenessReport(not failures, tuple(failures))


def nice_margins(xy, k: int) -> np.ndarray:
    """Signed sines between the rays from vertex i to its four niceness partners.

    Shape ``(n, 6)``.  A zero entry means two of the four lines coincide.
    """
    xy = np.asarray(xy, dtype=float)
    offs = nice_offsets(k)
    rays = [np.roll(xy, -o, axis=0) - xy for o in offs]
    out = []
    for a in range(4):
        for b in range(a + 1, 4):
            u, v = rays[a], rays[b]
            cr = u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]
            out.append(cr / (np.linalg.norm(u, axis=1) * np.linalg.norm(v, axis=1) + 1e-300))
    return np.column_stack(out)


# embeddedness and star-shapedness

def _orient(a, b, c):
    return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])


def segments_intersect(a0, a1, b0, b1, closed: bool = True, eps: float = 0.0) -> np.ndarray:
    """Broadcasting segment intersection test.

    With ``closed`` touching (an endpoint on the other segment) counts;
    otherwise only proper crossings do.
    """
    d1 = _orient(b0, b1, a0)
    d2 = _orient(b0, b1, a1)
    d3 = _orient(a0, a1, b0)
    d4 = _orient(a0, a1, b1)
    proper = (d1 * d2 < -eps) & (d3 * d4 < -eps)
    if not closed:
        return proper

    def on_seg(p, q, r, d):
        return (np.abs(d) <= eps) & (np.minimum(p[..., 0], q[..., 0]) - 1e-15 <= r[..., 0]) \
            & (r[..., 0] <= np.maximum(p[..., 0], q[..., 0]) + 1e-15) \
            & (np.minimum(p[..., 1], q[..., 1]) - 1e-15 <= r[..., 1]) \
            & (r[..., 1] <= np.maximum(p[..., 1], q[..., 1]) + 1e-15)

    touch = on_seg(b0, b1, a0, d1) | on_seg(b0, b1, a1, d2) | on_seg(a0, a1, b0, d3) | on_seg(a0, a1, b1, d4)
    return proper | ((d1 * d2 <= 0) & (d3 * d4 <= 0) & touch)


def is_embedded(xy) -> bool:
    xy = as_xy(xy)
    n = len(xy)
    a0, a1 = xy, np.roll(xy, -1, axis=0)
    hit = segments_intersect(a0[:, None], a1[:, None], a0[None], a1[None])
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    adjacent = (i == j) | ((i + 1) % n == j) | ((j + 1) % n == i)
    if np.any(hit & ~adjacent):
        return False
    # adjacent edges may only share their common vertex
    e = a1 - a0
    e_next = np.roll(e, -1, axis=0)
    cr = e[:, 0] * e_next[:, 1] - e[:, 1] * e_next[:, 0]
    dot = np.sum(e * e_next, axis=1)
    folded = (np.abs(cr) <= 1e-14 * np.linalg.norm(e, axis=1) * np.linalg.norm(e_next, axis=1)) & (dot < 0)
    if np.any(folded) or np.any(np.linalg.norm(e, axis=1) == 0):
        return False
    return True


def boundary_distance(xy, pts) -> np.ndarray:
    """Distance from each point to the polygon boundary."""
    xy = as_xy(xy)
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    a, b = xy, np.roll(xy, -1, axis=0)
    ab = b - a
    t = np.sum((pts[:, None] - a[None]) * ab[None], axis=-1) / np.sum(ab * ab, axis=1)[None]
    t = np.clip(t, 0, 1)
    proj = a[None] + t[..., None] * ab[None]
    return np.sqrt(((pts[:, None] - proj) ** 2).sum(-1)).min(axis=1)


def winding_numbers(xy, pts) -> np.ndarray:
    xy = as_xy(xy)
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    d = xy[None] - pts[:, None]
    dn = np.roll(d, -1, axis=1)
    ang = np.arctan2(d[..., 0] * dn[..., 1] - d[..., 1] * dn[..., 0], np.sum(d * dn, axis=-1))
    return np.rint(ang.sum(axis=1) / (2 * np.pi)).astype(int)


def points_inside(xy, pts, margin: float = 0.0) -> np.ndarray:
    """Strict interior test: nonzero winding and boundary distance above margin."""
    return (winding_numbers(xy, pts) != 0) & (boundary_distance(xy, pts) > margin)


def is_strictly_star_shaped(P, x, tol: float = 1e-12) -> bool:
    """True iff every ray from x meets the polygon exactly once."""
    xy = as_xy(P)
    x = np.asarray(x, dtype=float)
    if not is_embedded(xy):
        raise NotEmbedded("polygon is not embedded")
    scale = max(diameter(xy), 1e-300)
    if boundary_distance(xy, x)[0] <= tol * scale:
        raise PointOnBoundary(f"{x} lies on the polygon")
    d = xy - x
    dn = np.roll(d, -1, axis=0)
    ang = np.arctan2(d[:, 0] * dn[:, 1] - d[:, 1] * dn[:, 0], np.sum(d * dn, axis=1))
    total = ang.sum()
    if np.all(ang > 0) and abs(total - 2 * np.pi) < 1e-6:
        return True
    if np.all(ang < 0) and abs(total + 2 * np.pi) < 1e-6:
        return True
    return False


def ray_crossing_counts(xy, x, n_rays: int = 3600) -> np.ndarray:
    """Number of polygon crossings along each of ``n_rays`` rays from x.

    Brute-force oracle for star-shapedness.  Edges are half-open so a ray
    through a vertex is counted once.
    """
    xy = as_xy(xy)
    x = np.asarray(x, dtype=float)
    th = 2 * np.pi * (np.arange(n_rays) + 0.381966) / n_rays
    u = np.column_stack([np.cos(th), np.sin(th)])
    a = xy - x
    e = np.roll(xy, -1, axis=0) - xy
    # solve t u = a + s e  ->  t, s by Cramer
    den = u[:, None, 0] * (-e[None, :, 1]) - u[:, None, 1] * (-e[None, :, 0])
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (a[None, :, 0] * (-e[None, :, 1]) - a[None, :, 1] * (-e[None, :, 0])) / den
        s = (u[:, None, 0] * a[None, :, 1] - u[:, None, 1] * a[None, :, 0]) / den
    hit = (den != 0) & (t > 0) & (s >= 0) & (s < 1)
    return hit.sum(axis=1)


def star_shaped_by_rays(xy, x, n_rays: int = 3600) -> bool:
    return bool(np.all(ray_crossing_counts(xy, x, n_rays) == 1))


# diagonal classification

@dataclass(frozen=True)
class DiagonalClassification:
    tags: tuple

    @property
    def all_regular(self) -> bool:
        return all(t == "regular" for t in self.tags)

    def indices(self, tag: str):
        return [i for i, t in enumerate(self.tags) if t == tag]


def classify_diagonals(P: LabeledPolygon, k: int, angle_tol: float = ANGLE_TOL) -> DiagonalClassification:
    xy = P.xy
    offs = nice_offsets(k)
    rays = {o: np.roll(xy, -o, axis=0) - xy for o in offs}
    units = {o: r / np.maximum(np.linalg.norm(r, axis=1), 1e-300)[:, None] for o, r in rays.items()}

    def angle(u, v):
        return np.abs(np.arctan2(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0], np.sum(u * v, axis=1)))

    distinct = np.ones(P.n, dtype=bool)
    for a in range(4):
        for b in range(a + 1, 4):
            th = angle(units[offs[a]], units[offs[b]])
            line_sep = np.minimum(th, np.pi - th)
            distinct &= line_sep > angle_tol
    # folded: rays to P[i-k-1] and P[i+k+1] coincide (the (k+1)-diagonals are anti-parallel)
    folded = angle(units[-k - 1], units[k + 1]) <= angle_tol
    # aligned: rays to P[i-k] and P[i+k] are opposite (the k-diagonals point the same way)
    aligned = np.pi - angle(units[-k], units[k]) <= angle_tol
    tags = []
    for i in range(P.n):
        if distinct[i]:
            tags.append("regular")
        elif folded[i]:
            tags.append("collapsed-folded")
        elif aligned[i]:
            tags.append("collapsed-aligned")
        else:
            tags.append("collapsed-other")
    return DiagonalClassification(tuple(tags))


# bird certificates

@dataclass(frozen=True)
class BirdCertificate:
    ok: bool
    failing_parameter: float | None = None
    intervals_checked: int = 0
    min_step: float = 1e-6
    note: str = ""


def projectively_regular(P: LabeledPolygon, tol: float = 1e-7) -> bool:
    """Whether P is, label for label, a projective image of the regular n-gon."""
    R = regular_ngon(P.n)
    try:
        H = projective_map_from_points(P.vertices[:4], R.vertices[:4])
    except np.linalg.LinAlgError:
        return False
    img = normalize(H.apply_points(P.vertices))
    return float(np.linalg.norm(np.cross(img, R.vertices), axis=1).max()) < tol


def bird_certificate(path, k: int, min_step: float = 1e-6, initial_splits: int = 8) -> BirdCertificate:
    """Certify a piecewise-linear path of k-nice polygons starting at the regular n-gon.

    Every sample must be k-nice.  Between samples the vertex coordinates are
    interpolated linearly; the six signed sines per vertex (see
    :func:`nice_margins`) are tracked and any sign change is bisected down to
    ``min_step`` and reported as the failing parameter.  Intervals where a
    margin is small compared with its variation are subdivided.  This is a
    heuristic certificate: a double root strictly inside an interval with
    large end margins could in principle be missed.
    """
    path = list(path)
    if not path:
        raise ParamError("empty path")
    if not projectively_regular(path[0]):
        raise PathStartNotRegular("path must start at the regular n-gon")
    for idx, Q in enumerate(path):
        if not Q.is_affine():
            raise ParamError(f"path sample {idx} is not in the affine chart")
        rep = is_k_nice(Q, k)
        if not rep.ok:
            return BirdCertificate(False, float(idx), 0, min_step, rep.failures[0].reason)
    checked = 0
    for seg in range(len(path) - 1):
        A, B = path[seg].xy, path[seg + 1].xy
        margin = lambda s: nice_margins((1 - s) * A + s * B, k)
        grid = np.linspace(0, 1, initial_splits + 1)
        ms = [margin(s) for s in grid]
        stack = [(grid[i], grid[i + 1], ms[i], ms[i + 1]) for i in range(initial_splits)][::-1]
        while stack:
            s0, s1, m0, m1 = stack.pop()
            checked += 1
            flip = np.sign(m0) != np.sign(m1)
            if np.any(flip):
                # locate the first sign change
                while s1 - s0 > min_step:
                    sm = 0.5 * (s0 + s1)
                    mm = margin(sm)
                    if np.any(np.sign(m0) != np.sign(mm)):
                        s1, m1 = sm, mm
                    else:
                        s0, m0 = sm, mm
                return BirdCertificate(False, seg + 0.5 * (s0 + s1), checked, min_step,
                                       "niceness breaks along the path")
            worry = np.minimum(np.abs(m0), np.abs(m1)) < np.abs(m1 - m0)
            if np.any(worry) and s1 - s0 > min_step:
                sm = 0.5 * (s0 + s1)
                mm = margin(sm)
                stack.append((sm, s1, mm, m1))
                stack.append((s0, sm, m0, mm))
            elif np.any(np.abs(m0) <= ANGLE_TOL) or np.any(np.abs(m1) <= ANGLE_TOL):
                return BirdCertificate(False, seg + s0, checked, min_step, "margin vanishes")
    return BirdCertificate(True, None, checked, min_step, f"bisection depth {min_step:g}")


def bird_perturb(n: int, k: int, seed=None, noise: float = 0.12, attempts: int = 60):
    """Random k-bird: a certified straight-line perturbation of the regular n-gon.

    Returns ``(polygon, certificate)``.  Failed draws are retried with a
    slightly smaller noise level.
    """
    if not n > 3 * k:
        raise BadN(f"B(k={k}, n={n}) is empty: need n > 3k")
    rng = np.random.default_rng(seed)
    R = regular_ngon(n)
    for _ in range(attempts):
        xy = R.xy + noise * rng.normal(size=(n, 2))
        if signed_area(xy) <= 0 or not is_embedded(xy):
            noise *= 0.9
            continue
        Q = LabeledPolygon.from_xy(xy, orientation=1)
        cert = bird_certificate([R, Q], k)
        if cert.ok:
            return Q, cert
        noise *= 0.9
    raise ParamError(f"could not certify a bird after {attempts} attempts")
