"""Souls, feathers, nesting checks and the affine diameter ratio."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.optimize import minimize_scalar

from .dynamics import delta_k_direct, iterate
from .errors import EmptyRegion
from .polygon import (
    LabeledPolygon,
    as_xy,
    boundary_distance,
    diameter,
    is_strictly_star_shaped,
    points_inside,
    segments_intersect,
    signed_area,
    star_shaped_by_rays,
)
from .projective import ProjMap, affine, lift


@dataclass(frozen=True)
class HalfPlane:
    """Closed region to the left of an oriented line: ``line . (x, y, 1) >= 0``."""

    line: np.ndarray

    @classmethod
    def left_of(cls, a, b) -> "HalfPlane":
        h = np.cross(lift(np.asarray(a, float)), lift(np.asarray(b, float)))
        return cls(h / np.linalg.norm(h[:2]))

    def value(self, pts) -> np.ndarray:
        """Signed distance, positive inside."""
        return lift(np.atleast_2d(pts)) @ self.line

    def flipped(self) -> "HalfPlane":
        return HalfPlane(-self.line)


@dataclass(frozen=True, eq=False)
class ConvexRegion:
    """Counter-clockwise convex polygon; may be empty, a point or a segment."""

    vertices: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        if len(v) >= 3 and signed_area(v) < 0:
            v = v[::-1]
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def empty(self) -> bool:
        return len(self.vertices) == 0

    @property
    def area(self) -> float:
        return signed_area(self.vertices) if len(self.vertices) >= 3 else 0.0

    @property
    def diameter(self) -> float:
        return diameter(self.vertices) if len(self.vertices) else 0.0

    def has_interior(self, rel_tol: float = 1e-12) -> bool:
        d = self.diameter
        return d > 0 and self.area > rel_tol * d * d

    def interior_point(self) -> np.ndarray:
        if self.empty:
            raise EmptyRegion("region is empty")
        v = self.vertices
        if len(v) < 3 or self.area <= 0:
            return v.mean(axis=0)
        x, y = v[:, 0], v[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        cr = x * yn - xn * y
        a = cr.sum() / 2
        return np.array([((x + xn) * cr).sum(), ((y + yn) * cr).sum()]) / (6 * a)

    def signed_distance(self, pts) -> np.ndarray:
        """Min over edges of the left distance; >= 0 inside."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        v = self.vertices
        if len(v) < 3:
            return np.full(len(pts), -np.inf)
        e = np.roll(v, -1, axis=0) - v
        nrm = np.column_stack([-e[:, 1], e[:, 0]]) / np.linalg.norm(e, axis=1)[:, None]
        return ((pts[:, None, :] - v[None]) * nrm[None]).sum(-1).min(axis=1)

    def contains(self, pts, tol: float = 1e-9) -> np.ndarray:
        """Closed containment, allowing boundary contact up to ``tol`` times the diameter."""
        return self.signed_distance(pts) >= -tol * max(self.diameter, 1e-300)

    def sample(self, count: int, rng) -> np.ndarray:
        """Uniform random points from the interior (triangle-fan sampling)."""
        v = self.vertices
        if len(v) < 3:
            raise EmptyRegion("region has no interior")
        tri = np.stack([np.repeat(v[:1], len(v) - 2, 0), v[1:-1], v[2:]], axis=1)
        areas = np.abs(triangle_area(tri))
        pick = rng.choice(len(tri), size=count, p=areas / areas.sum())
        r1, r2 = rng.uniform(size=(2, count))
        s = np.sqrt(r1)
        w = np.column_stack([1 - s, s * (1 - r2), s * r2])
        return np.einsum("ij,ijk->ik", w, tri[pick])

    def transformed(self, M: ProjMap) -> "ConvexRegion":
        return ConvexRegion(M.apply_affine(self.vertices)) if len(self.vertices) else self


def clip(region_xy, h: HalfPlane, tol: float = 0.0) -> np.ndarray:
    """Sutherland-Hodgman clip of a convex polygon by one closed half-plane."""
    v = np.asarray(region_xy, dtype=float)
    if len(v) == 0:
        return v
    s = h.value(v)
    keep = s >= -tol
    if keep.all():
        return v
    if not keep.any():
        return np.zeros((0, 2))
    out = []
    m = len(v)
    for i in range(m):
        j = (i + 1) % m
        if keep[i]:
            out.append(v[i])
        if keep[i] != keep[j]:
            t = s[i] / (s[i] - s[j])
            out.append(v[i] + t * (v[j] - v[i]))
    return np.array(out)


def intersect_half_planes(planes, bound: float) -> ConvexRegion:
    box = bound * np.array([[-1, -1], [1, -1], [1, 1], [-1, 1]], dtype=float)
    region = box
    for h in planes:
        region = clip(region, h)
        if len(region) == 0:
            break
    if len(region):
        # drop repeated points produced by clipping through vertices
        keep = np.linalg.norm(region - np.roll(region, 1, axis=0), axis=1) > 1e-15 * bound
        region = region[keep] if keep.any() else region[:1]
    return ConvexRegion(region)


def hull_region(points) -> ConvexRegion:
    from scipy.spatial import ConvexHull

    pts = np.asarray(points, dtype=float)
    return ConvexRegion(pts[ConvexHull(pts).vertices])


def _orientation(P) -> int:
    xy = as_xy(P)
    return 1 if signed_area(xy) >= 0 else -1


def soul_half_planes(P: LabeledPolygon, k: int):
    """Left half-planes of the oriented (k+1)-diagonals P_i -> P_{i+k+1}.

    For a clockwise polygon the right half-planes are used, which is the
    same construction after reversing orientation.
    """
    xy = P.xy
    n = P.n
    sgn = _orientation(xy)
    out = []
    for i in range(n):
        h = HalfPlane.left_of(xy[i], xy[(i + k + 1) % n])
        out.append(h if sgn > 0 else h.flipped())
    return out


def soul(P: LabeledPolygon, k: int) -> ConvexRegion:
    xy = P.xy
    bound = 4 * np.abs(xy).max() + 1.0
    return intersect_half_planes(soul_half_planes(P, k), bound)


def kernel(P) -> ConvexRegion:
    """Visibility kernel: intersection of the inner half-planes of the edges."""
    xy = as_xy(P)
    sgn = _orientation(xy)
    hs = []
    for i in range(len(xy)):
        h = HalfPlane.left_of(xy[i], xy[(i + 1) % len(xy)])
        hs.append(h if sgn > 0 else h.flipped())
    return intersect_half_planes(hs, 4 * np.abs(xy).max() + 1.0)


def star_shaped_wrt_region(P, region: ConvexRegion, samples: int = 20, seed=0, rays: int = 0) -> bool:
    """Strict star-shapedness with respect to sampled interior points plus region vertices.

    With ``rays > 0`` the ray-casting oracle is used instead of the angle test.
    """
    rng = np.random.default_rng(seed)
    pts = np.vstack([region.sample(samples, rng), region.vertices])
    xy = as_xy(P)
    for x in pts:
        if rays:
            if not star_shaped_by_rays(xy, x, rays):
                return False
        elif not is_strictly_star_shaped(xy, x):
            return False
    return True


# containment

def polygon_contains_points(xy, pts, strict: bool = True, rel_tol: float = 1e-9) -> np.ndarray:
    """Points inside the region bounded by an embedded polygon.

    Strict: interior with a relative margin.  Otherwise boundary contact
    within the margin counts as inside.
    """
    xy = as_xy(xy)
    pts = np.atleast_2d(pts)
    margin = rel_tol * diameter(xy)
    from .polygon import winding_numbers

    inside = winding_numbers(xy, pts) != 0
    dist = boundary_distance(xy, pts)
    return inside & (dist > margin) if strict else inside | (dist <= margin)


def polygon_contains_polygon(outer, inner, strict: bool = True, rel_tol: float = 1e-9) -> bool:
    """Region bounded by ``inner`` lies in the region bounded by ``outer``."""
    outer, inner = as_xy(outer), as_xy(inner)
    if not polygon_contains_points(outer, inner, strict, rel_tol).all():
        return False
    a0, a1 = inner, np.roll(inner, -1, axis=0)
    b0, b1 = outer, np.roll(outer, -1, axis=0)
    cross = segments_intersect(a0[:, None], a1[:, None], b0[None], b1[None], closed=False)
    return not cross.any()


def segment_in_interior(xy, p, q, rel_tol: float = 1e-9) -> bool:
    xy = as_xy(xy)
    if not polygon_contains_points(xy, np.array([p, q, (np.asarray(p) + q) / 2]), True, rel_tol).all():
        return False
    hit = segments_intersect(np.asarray(p)[None], np.asarray(q)[None], xy, np.roll(xy, -1, axis=0))
    return not hit.any()


# feathers

@dataclass(frozen=True)
class Feather:
    index: int
    base: np.ndarray
    tip: np.ndarray

    @property
    def triangle(self) -> np.ndarray:
        return np.array([self.base[0], self.base[1], self.tip])


def feathers(P: LabeledPolygon, k: int, image: LabeledPolygon | None = None):
    """Feather i is the hull of edge (P_i, P_{i+1}) and vertex i of Delta_k(P)."""
    img = delta_k_direct(P, k) if image is None else image
    xy, tips = P.xy, img.xy
    n = P.n
    return [Feather(i, np.array([xy[i], xy[(i + 1) % n]]), tips[i]) for i in range(n)]


def white_triangles(P: LabeledPolygon, image: LabeledPolygon) -> np.ndarray:
    """Triangles (Q_i, P_{i+1}, Q_{i+1}) filling the gaps between consecutive feathers."""
    xy, q = P.xy, image.xy
    return np.stack([q, np.roll(xy, -1, axis=0), np.roll(q, -1, axis=0)], axis=1)


def triangle_area(T) -> np.ndarray:
    T = np.asarray(T, dtype=float)
    u, v = T[..., 1, :] - T[..., 0, :], T[..., 2, :] - T[..., 0, :]
    return 0.5 * (u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0])


def triangles_overlap(T1, T2, rel_tol: float = 1e-9) -> bool:
    """Whether two triangles share interior points (separating-axis test)."""
    scale = max(diameter(T1), diameter(T2))
    for T in (T1, T2):
        for i in range(3):
            e = T[(i + 1) % 3] - T[i]
            nrm = np.array([-e[1], e[0]])
            nrm /= np.linalg.norm(nrm)
            p1, p2 = T1 @ nrm, T2 @ nrm
            if p1.max() <= p2.min() + rel_tol * scale or p2.max() <= p1.min() + rel_tol * scale:
                return False
    return True


@dataclass(frozen=True)
class FeatherReport:
    inside: bool
    disjoint: bool
    tips_inside: bool
    area_residual: float
    overlapping_pairs: tuple = ()

    @property
    def passed(self) -> bool:
        return self.inside and self.disjoint and self.tips_inside and self.area_residual < 1e-8


def annulus_area_residual(P: LabeledPolygon, image: LabeledPolygon) -> float:
    """|sum of feather and white triangle areas - (area P - area image)| relative."""
    fs = np.stack([f.triangle for f in feathers(P, 0, image)])
    total = np.abs(triangle_area(fs)).sum() + np.abs(triangle_area(white_triangles(P, image))).sum()
    ring = abs(signed_area(P.xy)) - abs(signed_area(image.xy))
    return abs(total - ring) / abs(ring)


def _feather_inside(xy, f: Feather) -> bool:
    """The feather minus its base lies in the open region bounded by the polygon."""
    n = len(xy)
    i = f.index
    if not polygon_contains_points(xy, np.vstack([f.tip, f.triangle.mean(axis=0)])).all():
        return False
    a0, a1 = xy, np.roll(xy, -1, axis=0)
    for v in (i, (i + 1) % n):
        # the side from P_v to the tip may touch only the two edges at P_v, and only at P_v
        other = np.array([e for e in range(n) if e not in (v, (v - 1) % n)])
        if segments_intersect(xy[v], f.tip, a0[other], a1[other]).any():
            return False
        mid = 0.5 * (xy[v] + f.tip)
        if not polygon_contains_points(xy, mid[None]).all():
            return False
    return True


def feather_report(P: LabeledPolygon, k: int) -> FeatherReport:
    img = delta_k_direct(P, k)
    fs = feathers(P, k, img)
    xy = P.xy
    inside = all(_feather_inside(xy, f) for f in fs)
    pairs = tuple((a.index, b.index) for a, b in combinations(fs, 2) if triangles_overlap(a.triangle, b.triangle))
    tips = img.xy
    tips_ok = all(segment_in_interior(xy, tips[i], tips[(i + 1) % P.n]) for i in range(P.n))
    return FeatherReport(inside, not pairs, tips_ok, annulus_area_residual(P, img), pairs)


# diagonal configurations

def oriented_diagonals(P: LabeledPolygon, k: int):
    xy = P.xy
    heads = np.roll(xy, -(k + 1), axis=0)
    return xy, heads


def detect_opposing(P: LabeledPolygon, k: int, tol: float = 1e-9):
    """Pairs (i, j) of (k+1)-diagonals lying on one line with opposite directions."""
    tails, heads = oriented_diagonals(P, k)
    L = np.cross(lift(tails), lift(heads))
    L /= np.linalg.norm(L, axis=1)[:, None]
    u = heads - tails
    out = []
    for i, j in combinations(range(P.n), 2):
        if np.linalg.norm(np.cross(L[i], L[j])) < tol and u[i] @ u[j] < 0:
            out.append((i, j))
    return out


def detect_interlaced(P: LabeledPolygon, k: int, rel_tol: float = 1e-12):
    """Triples of pairwise crossing (k+1)-diagonals whose left half-planes bound a triangle."""
    tails, heads = oriented_diagonals(P, k)
    n = P.n
    cross = segments_intersect(tails[:, None], heads[:, None], tails[None], heads[None], closed=False)
    sgn = _orientation(P)
    H = np.cross(lift(tails), lift(heads)) * sgn
    H /= np.linalg.norm(H[:, :2], axis=1)[:, None]
    scale = diameter(P.xy)
    out = []
    for i, j, l in combinations(range(n), 3):
        if not (cross[i, j] and cross[j, l] and cross[i, l]):
            continue
        # three half-planes cut out a bounded region iff their normals positively span
        nv = H[[i, j, l], :2]
        turns = [nv[a, 0] * nv[b, 1] - nv[a, 1] * nv[b, 0] for a, b in ((0, 1), (1, 2), (2, 0))]
        if not (all(t > 0 for t in turns) or all(t < 0 for t in turns)):
            continue
        pts = affine(np.cross(H[[i, j, i]], H[[j, l, l]]))
        region = intersect_half_planes([HalfPlane(H[i]), HalfPlane(H[j]), HalfPlane(H[l])],
                                       4 * np.abs(pts).max() + 1)
        if region.area > rel_tol * scale * scale:
            out.append((i, j, l))
    return out


def triple_concurrency(P: LabeledPolygon, m: int, triples=None):
    """Concurrency residuals |det(L_a, L_b, L_c)| of unit m-diagonals P_{a,a+m}.

    Returns (minimum residual, minimizing triple) over ``triples`` or over all
    triples of m-diagonals.
    """
    V = P.vertices
    L = np.cross(V, P.rolled(m))
    L /= np.linalg.norm(L, axis=1)[:, None]
    cand = list(triples) if triples is not None else list(combinations(range(P.n), 3))
    idx = np.array(cand) % P.n
    res = np.abs(np.einsum("ij,ij->i", np.cross(L[idx[:, 0]], L[idx[:, 1]]), L[idx[:, 2]]))
    best = int(np.argmin(res))
    return float(res[best]), tuple(int(x) for x in cand[best])


# nesting

@dataclass(frozen=True)
class NestingReport:
    orbit_in_soul: bool
    chain: tuple
    star_wrt_hull: bool
    star_by_rays: bool

    @property
    def passed(self) -> bool:
        return self.orbit_in_soul and all(self.chain) and self.star_wrt_hull and self.star_by_rays


def soul_nesting_check(P: LabeledPolygon, k: int, chain_levels: int = 4, rays: int = 3600) -> NestingReport:
    """Delta_k^n(P) lies in the soul, and S_{l+n} < P^{l+n} < S_l < P^l for small l."""
    from scipy.spatial import ConvexHull

    n = P.n
    orbit = iterate(P, k, 0, n + chain_levels - 1, renormalize=False, with_souls=True)
    polys = [orbit.raw(i) for i in range(len(orbit.levels))]
    souls = orbit.souls
    in_soul = bool(souls[0].contains(polys[n].xy).all())
    chain = []
    for l in range(chain_levels):
        s_far, p_far, s_near, p_near = souls[l + n], polys[l + n], souls[l], polys[l]
        ok = (not s_far.empty and polygon_contains_points(p_far.xy, s_far.vertices, strict=False).all()
              and s_near.contains(p_far.xy).all()
              and polygon_contains_points(p_near.xy, s_near.vertices, strict=False).all())
        chain.append(bool(ok))
    hull = polys[n].xy[ConvexHull(polys[n].xy).vertices]
    star = all(is_strictly_star_shaped(P.xy, x) for x in hull)
    star_rays = all(star_shaped_by_rays(P.xy, x, rays) for x in hull)
    return NestingReport(in_soul, tuple(chain), star, star_rays)


# affine diameter ratio

def chord_length(region_xy, theta: float) -> float:
    """Longest chord of a convex polygon parallel to direction theta."""
    v = np.asarray(region_xy, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    x = v @ np.array([c, s])
    y = v @ np.array([-s, c])
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    best = 0.0
    for y0 in y:
        lo, hi = np.minimum(y, yn), np.maximum(y, yn)
        hit = (lo <= y0) & (y0 <= hi)
        flat = hit & (y == yn)
        span = hit & (y != yn)
        xs = list(x[flat]) + list(xn[flat])
        t = (y0 - y[span]) / (yn[span] - y[span])
        xs += list(x[span] + t * (xn[span] - x[span]))
        if xs:
            best = max(best, max(xs) - min(xs))
    return best


def affine_diameter_ratio(S1: ConvexRegion, S2: ConvexRegion, directions: int = 720) -> float:
    """sup over directions of chord(S1) / chord(S2), by sampling plus golden-section refinement."""
    if S1.empty or S2.empty or not S2.has_interior():
        raise EmptyRegion("diameter ratio needs nonempty regions, the second with interior")
    a, b = S1.vertices, S2.vertices
    ratio = lambda th: chord_length(a, th) / chord_length(b, th)
    th = np.pi * np.arange(directions) / directions
    vals = np.array([ratio(t) for t in th])
    i = int(np.argmax(vals))
    h = np.pi / directions
    res = minimize_scalar(lambda t: -ratio(t), bounds=(th[i] - h, th[i] + h), method="bounded",
                          options={"xatol": 1e-10})
    return float(max(vals[i], -res.fun))
