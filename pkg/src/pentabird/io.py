"""File formats: polygon JSON, orbit CSV/JSON, triangulation JSON, reports.

Floats are written with Python's shortest round-trip repr, so reading a file
and writing it again reproduces it byte for byte.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math

import numpy as np

from .errors import ParseError
from .polygon import KINDS, LabeledPolygon


def _clean(obj):
    """Convert numpy values to plain Python; non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2) + "\n"


def polygon_to_dict(P: LabeledPolygon, provenance: dict | None = None) -> dict:
    d = {
        "kind": P.kind,
        "n": P.n,
        "vertices": P.vertices.tolist(),
        "orientation": P.orientation,
    }
    if provenance:
        d["provenance"] = provenance
    return d


def polygon_to_json(P: LabeledPolygon, provenance: dict | None = None) -> str:
    return dumps(polygon_to_dict(P, provenance))


def polygon_from_dict(d) -> LabeledPolygon:
    if not isinstance(d, dict):
        raise ParseError("polygon must be a JSON object")
    for key in ("kind", "n", "vertices", "orientation"):
        if key not in d:
            raise ParseError(f"missing field {key!r}")
    if d["kind"] not in KINDS:
        raise ParseError(f"kind must be one of {KINDS}")
    try:
        v = np.array(d["vertices"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad vertex list: {exc}") from None
    if v.ndim != 2 or v.shape[1] not in (2, 3):
        raise ParseError("vertices must be [x, y, w] or [x, y] triples")
    if v.shape[1] == 2:
        v = np.column_stack([v, np.ones(len(v))])
    if not isinstance(d["n"], int) or d["n"] != len(v):
        raise ParseError(f"n={d['n']} does not match {len(v)} vertices")
    if d["orientation"] not in (1, -1):
        raise ParseError("orientation must be 1 or -1")
    if not np.all(np.isfinite(v)) or np.any(np.linalg.norm(v, axis=1) == 0):
        raise ParseError("vertices must be finite and nonzero")
    try:
        return LabeledPolygon(v, d["kind"], d["orientation"])
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def polygon_from_json(text: str):
    """Returns (polygon, provenance or None)."""
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return polygon_from_dict(d), (d.get("provenance") if isinstance(d, dict) else None)


def read_polygon(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    return polygon_from_json(text)


# orbits

def orbit_columns(n: int):
    cols = ["level", "energy", "diameter", "soul_area"]
    for i in range(n):
        cols += [f"x_{i}", f"y_{i}"]
    return cols


def _num(x) -> str:
    x = float(x)
    return repr(x) if math.isfinite(x) else ("nan" if math.isnan(x) else ("inf" if x > 0 else "-inf"))


def orbit_to_csv(record) -> str:
    """One row per level: level, energy, diameter, soul_area, x_0, y_0, ..."""
    n = record.frames[0].n
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(orbit_columns(n))
    for i, lvl in enumerate(record.levels):
        xy = record.raw(i).xy
        row = [str(lvl), _num(record.energies[i]), _num(record.diameters[i]), _num(record.soul_areas[i])]
        row += [_num(c) for c in xy.ravel()]
        w.writerow(row)
    return buf.getvalue()


def orbit_to_dict(record) -> dict:
    return {
        "k": record.k,
        "levels": list(record.levels),
        "energies": record.energies,
        "diameters": record.diameters,
        "soul_areas": record.soul_areas,
        "iterates": [record.raw(i).vertices for i in range(len(record.levels))],
        "display_maps": [record.display_map(i).matrix for i in range(len(record.levels))],
        "error": record.error,
    }


def triangulation_to_dict(tri) -> dict:
    return {
        "k": tri.k,
        "n": tri.n,
        "iterates": [xy for xy in tri.iterates],
        "layers": [
            {
                "level": L.level,
                "triangles": [{"vertices": [list(r) for r in t], "color": c} for t, c in L.triangles],
            }
            for L in tri.layers
        ],
    }
