import numpy as np
import pytest

from pentabird.errors import InsufficientLayers, ParamError
from pentabird.polygon import bird_perturb, regular_ngon, signed_area
from pentabird.triangulation import build_triangulation, petal_contains_orbit, spiral_paths


def shoelace(xy):
    x, y = xy[:, 0], xy[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def test_bird_triangulation_5_16():
    B, _ = bird_perturb(16, 5, seed=1)
    T = build_triangulation(B, 5, 8)
    assert len(T.layers) == 8 and all(len(L.black) == 16 == len(L.white) for L in T.layers)
    assert T.area_residuals().max() < 1e-8
    assert T.interior_degrees_ok()
    assert not any(T.overlapping_pairs(l) for l in range(8))


def test_layer_areas_against_shoelace():
    B, _ = bird_perturb(7, 2, seed=4)
    T = build_triangulation(B, 2, 3)
    for L in T.layers:
        tri_sum = sum(shoelace(T.triangle_xy(t)) for t, _ in L.triangles)
        ring = shoelace(T.iterates[L.level]) - shoelace(T.iterates[L.level + 1])
        assert tri_sum == pytest.approx(ring, rel=1e-8)
        assert abs(signed_area(T.iterates[L.level])) == pytest.approx(shoelace(T.iterates[L.level]))


def test_degrees_count_six():
    T = build_triangulation(regular_ngon(10), 3, 5)
    deg = T.vertex_degrees()
    for l in range(1, 5):
        assert all(deg[(l, j)] == 6 for j in range(10))
    assert all(deg[(0, j)] == 3 for j in range(10))


def test_spirals_on_regular_decagon():
    T = build_triangulation(regular_ngon(10), 2, 14)
    pair = spiral_paths(T, 0)
    assert pair.left.locally_convex and pair.right.locally_convex
    assert pair.meet_level == 10 and not pair.early_crossing
    assert np.allclose(pair.left.points[10], pair.right.points[10])
    assert petal_contains_orbit(T, pair)


@pytest.mark.parametrize("n,k", [(7, 2), (10, 3), (13, 4)])
def test_spirals_on_birds(n, k):
    B, _ = bird_perturb(n, k, seed=6)
    T = build_triangulation(B, k, n + 2)
    for start in (0, n // 2):
        pair = spiral_paths(T, start)
        assert pair.left.locally_convex and pair.right.locally_convex and not pair.early_crossing
        assert petal_contains_orbit(T, pair)


def test_parameter_errors():
    with pytest.raises(ParamError):
        build_triangulation(regular_ngon(7), 2, 0)
    T = build_triangulation(regular_ngon(7), 2, 1)
    with pytest.raises(InsufficientLayers):
        spiral_paths(T, 0)
    T = build_triangulation(regular_ngon(7), 2, 3)
    with pytest.raises(InsufficientLayers):
        petal_contains_orbit(T, spiral_paths(T, 0))
