import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pentabird.errors import DegenerateInertia, DegenerateJoin, DegenerateMeet
from pentabird.polygon import LabeledPolygon, dualize, regular_ngon
from pentabird.projective import (
    ProjMap,
    affine,
    cross_ratio,
    incidence,
    inertia_normalize,
    is_affine,
    join,
    lift,
    meet,
    normalize,
    pencil_cross_ratio,
    projective_map_from_points,
    slope_cross_ratio,
)

from conftest import seeds

coords = st.floats(-10, 10, allow_nan=False)


def line_through_slope(m, through=(0.0, 0.0)):
    """a x + b y + c = 0 with slope m through a point; m = inf gives a vertical line."""
    x0, y0 = through
    if np.isinf(m):
        return np.array([1.0, 0.0, -x0])
    return np.array([m, -1.0, y0 - m * x0])


def nullspace_line(p, q):
    """Oracle: the line through p and q from the SVD nullspace of the 2x3 system."""
    _, _, vt = np.linalg.svd(np.vstack([p, q]))
    return vt[-1]


def test_join_examples():
    l = join([1, 0, 1], [0, 1, 1])
    assert np.allclose(l, np.array([-1, -1, 1]) / np.sqrt(3))
    assert np.allclose(join([0, 0, 1], [1, 0, 1]), [0, 1, 0])
    with pytest.raises(DegenerateJoin):
        join([1, 2, 1], [2, 4, 2])


def test_meet_examples():
    assert np.allclose(meet([0, 1, 0], [1, 0, 0]), [0, 0, 1])
    p = meet([0, 1, -1], [0, 1, -3])
    assert abs(p[2]) < 1e-15 and not is_affine(p)
    with pytest.raises(DegenerateMeet):
        meet([1, 1, 1], [2, 2, 2])


@given(coords, coords, coords, coords)
def test_join_matches_nullspace(x0, y0, x1, y1):
    if np.hypot(x1 - x0, y1 - y0) < 1e-3:
        return
    p, q = lift([x0, y0]), lift([x1, y1])
    l = join(p, q)
    assert incidence(p, l) < 1e-12 and incidence(q, l) < 1e-12
    assert np.linalg.norm(np.cross(l, nullspace_line(p, q))) < 1e-9


@given(st.lists(coords, min_size=3, max_size=3))
def test_normalize_is_idempotent_and_canonical(v):
    v = np.array(v)
    if np.linalg.norm(v) < 1e-6:
        return
    u = normalize(v)
    assert abs(np.linalg.norm(u) - 1) < 1e-15
    assert np.array_equal(normalize(u), u)
    assert np.array_equal(normalize(-v), u)


def test_cross_ratio_examples():
    assert cross_ratio(0, 1, 2, 3) == pytest.approx(0.25, abs=1e-15)
    assert cross_ratio(1.5, 1.5, 2, 3) == 0.0


def test_cross_ratio_six_value_orbit():
    pts = (0.3, 1.7, -2.2, 5.0)
    lam = cross_ratio(*pts)
    expected = {lam, 1 - lam, 1 / lam, 1 / (1 - lam), (lam - 1) / lam, lam / (lam - 1)}
    got = {cross_ratio(*(pts[i] for i in perm)) for perm in itertools.permutations(range(4))}
    assert len(got) <= 6
    for g in got:
        assert min(abs(g - e) for e in expected) < 1e-12
    for e in expected:
        assert min(abs(g - e) for g in got) < 1e-12


def test_pencil_cross_ratio_slopes():
    lines = [line_through_slope(m) for m in (0, 1, 2, 3)]
    assert pencil_cross_ratio(lines) == pytest.approx(0.25, abs=1e-12)


def test_pencil_vertical_line_is_slope_limit():
    through = (0.4, -1.3)
    lines = [line_through_slope(m, through) for m in (1.0, 2.0, np.inf, 3.0)]
    limit = slope_cross_ratio([line_through_slope(m, through) for m in (1.0, 2.0, 1e8, 3.0)])
    assert pencil_cross_ratio(lines) == pytest.approx(limit, rel=1e-7)


@given(seeds)
def test_pencil_cross_ratio_is_projectively_invariant(seed):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=2)
    slopes = rng.normal(size=4) * 3
    lines = np.array([line_through_slope(m, c) for m in slopes])
    M = ProjMap.random(rng)
    before = pencil_cross_ratio(lines)
    after = pencil_cross_ratio(M.apply_lines(lines))
    assert abs(after - before) <= 1e-9 * max(1.0, abs(before))


@given(seeds)
def test_projmap_preserves_incidence(seed):
    rng = np.random.default_rng(seed)
    p, q = lift(rng.normal(size=2)), lift(rng.normal(size=2))
    M = ProjMap.random(rng)
    l = join(p, q)
    assert incidence(M.apply_points(p), M.apply_lines(l)) < 1e-12


def test_projective_map_from_points():
    rng = np.random.default_rng(3)
    src = lift(rng.normal(size=(4, 2)))
    dst = lift(rng.normal(size=(4, 2)))
    M = projective_map_from_points(src, dst)
    assert np.linalg.norm(np.cross(normalize(M.apply_points(src)), normalize(dst)), axis=1).max() < 1e-12


def test_inertia_normalize_moments():
    R = regular_ngon(9)
    pts = 3 * R.xy + np.array([5.0, 7.0])
    M = inertia_normalize(pts)
    out = M.apply_affine(pts)
    assert np.allclose(out.mean(axis=0), 0, atol=1e-12)
    assert np.allclose(out.T @ out / len(out), np.eye(2), atol=1e-12)
    # uniform scaling: the linear part is a multiple of the identity, oracle 1/sqrt(second moment)
    lin = M.matrix[:2, :2] / M.matrix[2, 2]
    assert np.allclose(lin, np.eye(2) * np.sqrt(2) / 3, atol=1e-12)
    assert np.allclose(M.apply_affine(np.array([[5.0, 7.0]])), 0, atol=1e-12)


def test_inertia_normalize_is_idempotent_and_rejects_lines():
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(12, 2))
    once = inertia_normalize(pts).apply_affine(pts)
    M = inertia_normalize(once)
    assert np.abs(M.matrix / M.matrix[2, 2] - np.eye(3)).max() < 1e-9
    with pytest.raises(DegenerateInertia):
        inertia_normalize(np.column_stack([np.arange(5.0), 2 * np.arange(5.0)]))


def test_dualize_involution_and_concurrency():
    rng = np.random.default_rng(1)
    P = LabeledPolygon.from_xy(rng.normal(size=(6, 2)))
    assert np.array_equal(dualize(dualize(P)).vertices, P.vertices)
    col = LabeledPolygon.from_xy(np.array([[0.0, 0.0], [1.0, 1.0], [2.5, 2.5], [0.0, 1.0]]))
    L = dualize(col).vertices[:3]
    assert np.linalg.svd(L, compute_uv=False)[-1] < 1e-12


def test_dual_of_regular_polygon_lies_on_conic():
    D = dualize(regular_ngon(11)).vertices
    x, y, w = D.T
    A = np.column_stack([x * x, x * y, y * y, x * w, y * w, w * w])
    s = np.linalg.svd(A[:6], compute_uv=False)
    assert s[-1] / s[0] < 1e-12
    _, _, vt = np.linalg.svd(A[:6])
    assert np.abs(A @ vt[-1]).max() < 1e-12


def test_affine_lift_round_trip():
    xy = np.array([[0.5, -2.0], [3.0, 4.0]])
    assert np.allclose(affine(lift(xy)), xy)
