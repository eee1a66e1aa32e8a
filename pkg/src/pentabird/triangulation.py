"""The degree-6 triangulation between consecutive iterates, and its spiral paths.

Triangles are stored combinatorially as triples of vertex references
``(level, index)``; coordinates are looked up in the stored iterates.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .bird import polygon_contains_points, triangle_area, triangles_overlap
from .dynamics import delta_k_direct
from .errors import InsufficientLayers, ParamError
from .polygon import LabeledPolygon, segments_intersect, signed_area


@dataclass(frozen=True)
class AnnulusLayer:
    level: int
    black: tuple
    white: tuple

    @property
    def triangles(self):
        return [(t, "black") for t in self.black] + [(t, "white") for t in self.white]


@dataclass(frozen=True)
class Triangulation:
    k: int
    n: int
    iterates: tuple
    layers: tuple

    def point(self, ref) -> np.ndarray:
        level, idx = ref
        return self.iterates[level][idx % self.n]

    def triangle_xy(self, tri) -> np.ndarray:
        return np.array([self.point(r) for r in tri])

    def area_residuals(self) -> np.ndarray:
        """Per layer: |sum of triangle areas - annulus area| / annulus area."""
        out = []
        for L in self.layers:
            tris = np.stack([self.triangle_xy(t) for t, _ in L.triangles])
            ring = abs(signed_area(self.iterates[L.level])) - abs(signed_area(self.iterates[L.level + 1]))
            out.append(abs(np.abs(triangle_area(tris)).sum() - ring) / abs(ring))
        return np.array(out)

    def overlapping_pairs(self, level: int):
        tris = [self.triangle_xy(t) for t, _ in self.layers[level].triangles]
        return [(a, b) for a, b in combinations(range(len(tris)), 2) if triangles_overlap(tris[a], tris[b])]

    def vertex_degrees(self) -> dict:
        deg = {}
        for L in self.layers:
            for t, _ in L.triangles:
                for lvl, idx in t:
                    key = (lvl, idx % self.n)
                    deg[key] = deg.get(key, 0) + 1
        return deg

    def interior_degrees_ok(self) -> bool:
        deg = self.vertex_degrees()
        inner = [(l, j) for l in range(1, len(self.layers)) for j in range(self.n)]
        return all(deg.get(v) == 6 for v in inner)


def build_triangulation(P: LabeledPolygon, k: int, layers: int) -> Triangulation:
    """Feathers (black) and their complements (white) between P^l and P^{l+1}."""
    if layers < 1:
        raise ParamError("need at least one layer")
    polys = [P]
    for _ in range(layers):
        polys.append(delta_k_direct(polys[-1], k))
    n = P.n
    out = []
    for l in range(layers):
        black = tuple(((l, i), (l, (i + 1) % n), (l + 1, i)) for i in range(n))
        white = tuple(((l + 1, i), (l, (i + 1) % n), (l + 1, (i + 1) % n)) for i in range(n))
        out.append(AnnulusLayer(l, black, white))
    return Triangulation(k, n, tuple(p.xy for p in polys), tuple(out))


@dataclass(frozen=True)
class SpiralPath:
    start: int
    handedness: str
    refs: tuple
    points: np.ndarray
    turns: np.ndarray

    @property
    def locally_convex(self) -> bool:
        t = self.turns
        return bool(np.all(t > 0) or np.all(t < 0))


def _turns(pts) -> np.ndarray:
    u = pts[1:-1] - pts[:-2]
    v = pts[2:] - pts[1:-1]
    return u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]


def _spiral(tri: Triangulation, start: int, hand: str) -> SpiralPath:
    step = 0 if hand == "left" else -1
    refs = tuple((l, (start + step * l) % tri.n) for l in range(len(tri.iterates)))
    pts = np.array([tri.point(r) for r in refs])
    return SpiralPath(start, hand, refs, pts, _turns(pts))


@dataclass(frozen=True)
class SpiralPair:
    left: SpiralPath
    right: SpiralPath
    meet_level: int | None
    meet_point: np.ndarray | None
    early_crossing: bool

    def petal(self) -> np.ndarray | None:
        """Closed polygon bounded by the two initial segments up to the first meeting."""
        if self.meet_level is None:
            return None
        m = self.meet_level
        return np.vstack([self.left.points[: m + 1], self.right.points[m - 1:0:-1]])


def spiral_paths(tri: Triangulation, start: int) -> SpiralPair:
    """The two spirals from vertex ``start`` of P that go straight through every vertex.

    At a vertex P^l_j the six neighbours in cyclic order are
    P^{l-1}_j, P^{l-1}_{j+1}, P^l_{j+1}, P^{l+1}_j, P^{l+1}_{j-1}, P^l_{j-1};
    leaving opposite to the arrival edge keeps three triangles on each side.
    The partners next share a vertex at level n.
    """
    if len(tri.layers) < 2:
        raise InsufficientLayers("spiral paths need at least two layers")
    left, right = _spiral(tri, start, "left"), _spiral(tri, start, "right")
    n = tri.n
    meet = n if len(tri.iterates) > n else None
    last = (meet if meet is not None else len(tri.iterates) - 1)
    a, b = left.points[: last + 1], right.points[: last + 1]
    # any geometric crossing strictly before the shared vertex?
    hit = segments_intersect(a[:-1, None], a[1:, None], b[None, :-1], b[None, 1:], closed=False)
    early = bool(hit.any())
    point = left.points[meet] if meet is not None else None
    return SpiralPair(left, right, meet, point, early)


def petal_contains_orbit(tri: Triangulation, pair: SpiralPair) -> bool:
    """Every iterate P^l with l >= n lies in the petal."""
    petal = pair.petal()
    if petal is None:
        raise InsufficientLayers("petal needs at least n layers")
    for l in range(pair.meet_level, len(tri.iterates)):
        if not polygon_contains_points(petal, tri.iterates[l], strict=False).all():
            return False
    return True
