"""Deterministic SVG rendering of polygons, souls, feathers and triangulations."""
from __future__ import annotations

import numpy as np

from .projective import ProjMap, inertia_normalize

DEFAULT_PALETTE = {
    "background": "#ffffff",
    "black": "#000000",
    "white": "#ffffff",
    "edge": "#1f3a93",
    "soul": "#c0392b",
    "polygon": "#000000",
}


def _fmt(x: float) -> str:
    s = f"{x:.4f}"
    return "0.0000" if s == "-0.0000" else s


def _path(pts, closed=True) -> str:
    cmds = [f"M {_fmt(pts[0, 0])} {_fmt(pts[0, 1])}"]
    cmds += [f"L {_fmt(x)} {_fmt(y)}" for x, y in pts[1:]]
    return " ".join(cmds) + (" Z" if closed else "")


class Scene:
    """Collects layers of geometry in model coordinates."""

    def __init__(self):
        self.items = []

    def polygon(self, xy, stroke=None, fill="none", width=1.0):
        self.items.append(("polygon", np.asarray(xy, float), stroke, fill, width))
        return self

    def triangles(self, tris, fill, stroke=None, width=0.5):
        for t in tris:
            self.items.append(("polygon", np.asarray(t, float), stroke, fill, width))
        return self

    def polyline(self, xy, stroke, width=1.0):
        self.items.append(("polyline", np.asarray(xy, float), stroke, "none", width))
        return self

    def points(self):
        pts = [it[1] for it in self.items if len(it[1])]
        return np.vstack(pts) if pts else np.zeros((0, 2))


def render_svg(scene: Scene, size: int = 600, margin: float = 0.05, normalize: str = "inertia",
               chart: ProjMap | None = None, reference=None, palette=None) -> str:
    """Render a scene to an SVG 1.1 document.

    ``normalize``: ``"inertia"`` applies the affine map making the vertex
    covariance of ``reference`` (default: all scene points) the identity;
    ``"none"`` keeps model coordinates.  ``chart`` is applied first, e.g. a
    chart sending the backward limit line to infinity.
    """
    pal = dict(DEFAULT_PALETTE, **(palette or {}))
    maps = []
    if chart is not None:
        maps.append(chart)
    ref = scene.points() if reference is None else np.asarray(reference, float)
    if chart is not None:
        ref = chart.apply_affine(ref)
    if normalize == "inertia" and len(ref) >= 3:
        maps.append(inertia_normalize(ref))
    elif normalize not in ("inertia", "none"):
        raise ValueError(f"unknown normalization {normalize!r}")

    def to_model(xy):
        for m in maps:
            xy = m.apply_affine(xy)
        return xy

    items = [(kind, to_model(xy), stroke, fill, w) for kind, xy, stroke, fill, w in scene.items]
    allpts = np.vstack([it[1] for it in items]) if items else np.zeros((1, 2))
    allpts = allpts[np.all(np.isfinite(allpts), axis=1)]
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    span = max(float((hi - lo).max()), 1e-300)
    scale = size * (1 - 2 * margin) / span
    center = (lo + hi) / 2

    def to_view(xy):
        v = (xy - center) * scale
        return np.column_stack([v[:, 0] + size / 2, size / 2 - v[:, 1]])

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="{pal["background"]}"/>',
    ]
    for kind, xy, stroke, fill, w in items:
        fill = pal.get(fill, fill)
        stroke = pal.get(stroke, stroke) if stroke else "none"
        d = _path(to_view(xy), closed=(kind == "polygon"))
        out.append(f'<path d="{d}" fill="{fill}" stroke="{stroke}" stroke-width="{_fmt(w)}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def triangulation_scene(tri, soul_region=None) -> Scene:
    sc = Scene()
    for layer in tri.layers:
        sc.triangles([tri.triangle_xy(t) for t in layer.white], "white", "black", 0.3)
        sc.triangles([tri.triangle_xy(t) for t in layer.black], "black", "black", 0.3)
    if soul_region is not None and len(soul_region.vertices) >= 3:
        sc.polygon(soul_region.vertices, stroke="soul", fill="soul", width=0.5)
    return sc


def feather_scene(P, feathers, soul_region=None, image=None) -> Scene:
    sc = Scene().polygon(P.xy, stroke="polygon", width=1.0)
    sc.triangles([f.triangle for f in feathers], "black", "black", 0.3)
    if image is not None:
        sc.polygon(image.xy, stroke="edge", width=0.8)
    if soul_region is not None and len(soul_region.vertices) >= 3:
        sc.polygon(soul_region.vertices, stroke="soul", fill="soul", width=0.5)
    return sc


def orbit_scene(polygons, soul_region=None) -> Scene:
    sc = Scene()
    for xy in polygons:
        sc.polygon(xy, stroke="polygon", width=0.8)
    if soul_region is not None and len(soul_region.vertices) >= 3:
        sc.polygon(soul_region.vertices, stroke="soul", fill="none", width=0.5)
    return sc
