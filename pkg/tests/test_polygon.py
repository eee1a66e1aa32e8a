import numpy as np
import pytest
from hypothesis import given, strategies as st

from pentabird.energy import chi_k
from pentabird.errors import BadN, NotCoprime, PathStartNotRegular
from pentabird.polygon import (
    LabeledPolygon,
    bird_certificate,
    bird_perturb,
    classify_diagonals,
    cyclic_cover,
    diagonal,
    is_embedded,
    is_k_nice,
    is_strictly_convex,
    is_strictly_star_shaped,
    random_convex_ngon,
    regular_ngon,
    segments_intersect,
    star_relabel,
    star_shaped_by_rays,
    winding_numbers,
)
from pentabird.projective import incidence, join, lift, normalize

from conftest import convex_polygons, seeds


def circle_polygon(angles, r=1.0):
    return LabeledPolygon.from_xy(r * np.column_stack([np.cos(angles), np.sin(angles)]))


def test_regular_square():
    assert np.allclose(regular_ngon(4).xy, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-15)
    with pytest.raises(BadN):
        regular_ngon(2)


def test_regular_heptagon_is_2_nice_hexagon_is_not():
    assert is_k_nice(regular_ngon(7), 2).ok
    rep = is_k_nice(regular_ngon(6), 2)
    assert not rep.ok and any("3k" in f.reason for f in rep.failures)


def test_niceness_failure_is_located():
    P = random_convex_ngon(7, seed=4)
    xy = P.xy.copy()
    # put P_0 on the line P_2 P_3, beyond P_3: then P_{0,2} = P_{0,3}
    xy[0] = xy[3] + 0.7 * (xy[3] - xy[2])
    rep = is_k_nice(LabeledPolygon.from_xy(xy), 2)
    assert not rep.ok
    assert 0 in {f.vertex for f in rep.failures}


def test_diagonal_examples():
    sq = regular_ngon(4)
    assert np.linalg.norm(np.cross(diagonal(sq, 0, 2), [0, 1, 0])) < 1e-15
    P = random_convex_ngon(9, seed=2)
    assert np.array_equal(diagonal(P, 3 + 9, 7), diagonal(P, 3, 7))
    L = LabeledPolygon(np.array([[0, 1.0, 0], [1.0, 0, 0], [1.0, 1.0, -1.0]]), "line")
    assert np.linalg.norm(np.cross(diagonal(L, 0, 1), [0, 0, 1])) < 1e-15


def test_star_shaped_examples():
    P = random_convex_ngon(9, seed=5)
    assert is_strictly_star_shaped(P, P.xy.mean(axis=0))
    dart = LabeledPolygon.from_xy(np.array([[0, 0], [2, 1], [4, 0], [2, 4.0]]))
    for x in ([2, 0.5], [0.6, 0.4]):
        x = np.array(x)
        assert not is_strictly_star_shaped(dart, x)
        assert not star_shaped_by_rays(dart.xy, x)
    assert is_strictly_star_shaped(dart, np.array([2.0, 2.0]))


def test_star_shaped_matches_ray_casting_on_bird():
    from pentabird.bird import soul

    B, cert = bird_perturb(7, 2, seed=11)
    assert cert.ok
    S = soul(B, 2)
    for x in S.sample(5, np.random.default_rng(0)):
        assert is_strictly_star_shaped(B, x)
        assert star_shaped_by_rays(B.xy, x)


def test_star_relabel():
    P = random_convex_ngon(10, seed=1)
    assert np.array_equal(star_relabel(P, 1).vertices, P.vertices)
    Q = star_relabel(star_relabel(P, 3), pow(3, -1, 10))
    assert np.array_equal(Q.vertices, P.vertices)
    with pytest.raises(NotCoprime):
        star_relabel(P, 4)
    deca = star_relabel(regular_ngon(10), -3)
    assert abs(winding_numbers(deca.xy, np.zeros((1, 2)))[0]) == 3


@given(st.integers(5, 15), seeds, st.integers(-20, 20))
def test_star_relabel_inverse_property(n, seed, r):
    from math import gcd

    if gcd(r % n, n) != 1:
        return
    P = random_convex_ngon(n, seed=seed)
    back = star_relabel(star_relabel(P, r), pow(r, -1, n))
    assert np.array_equal(back.vertices, P.vertices)


def test_cyclic_cover_energy_power():
    P = random_convex_ngon(7, seed=9)
    assert np.array_equal(cyclic_cover(P, 1).vertices, P.vertices)
    R = regular_ngon(5)
    assert chi_k(cyclic_cover(R, 2), 1) == pytest.approx(chi_k(R, 1) ** 2, rel=1e-12)
    assert chi_k(cyclic_cover(P, 3), 2) == pytest.approx(chi_k(P, 2) ** 3, rel=1e-9)


def test_classify_diagonals():
    assert classify_diagonals(regular_ngon(11), 3).all_regular
    # five consecutive collinear vertices, the middle one is aligned for k = 2
    ang = np.linspace(0.4, 2 * np.pi - 0.4, 6)
    arc = np.column_stack([np.cos(ang), np.sin(ang)])
    run = np.column_stack([np.full(5, 1.2), np.linspace(-1.0, 1.0, 5)])
    xy = np.vstack([run, arc[1:-1][::1]])
    P = LabeledPolygon.from_xy(xy)
    assert classify_diagonals(P, 2).tags[2] == "collapsed-aligned"
    # a pinched pentagon: P_0, P_2, P_3 collinear with P_0 outside [P_2, P_3]
    pinch = LabeledPolygon.from_xy(np.array([[3, 0], [2, 1], [1, 0], [-1, 0], [1, -1.0]]))
    assert classify_diagonals(pinch, 1).tags[0] == "collapsed-folded"


def test_random_convex_is_nice_for_all_admissible_k():
    for seed in range(100):
        n = 5 + seed % 12
        P = random_convex_ngon(n, seed=seed)
        assert is_strictly_convex(P.xy)
        for k in range(1, (n - 1) // 3 + 1):
            assert is_k_nice(P, k).ok, (n, k, seed)
    assert is_k_nice(random_convex_ngon(13, seed=0), 4).ok


@given(convex_polygons())
def test_convex_turning_angles_positive(P):
    xy = P.xy
    e = np.roll(xy, -1, axis=0) - xy
    turn = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
    assert np.all(turn > 0)


def test_bird_certificate_paths():
    R = regular_ngon(7)
    assert bird_certificate([R, R, R], 2).ok
    rng = np.random.default_rng(0)
    Q = LabeledPolygon.from_xy(R.xy + 0.05 * rng.normal(size=(7, 2)))
    assert bird_certificate([R, Q], 2).ok
    # wind the vertices twice around the circle
    path = [circle_polygon(2 * np.pi * np.arange(7) * (1 + s) / 7) for s in np.linspace(0, 1, 9)]
    cert = bird_certificate(path, 1)
    assert not cert.ok and cert.failing_parameter is not None
    with pytest.raises(PathStartNotRegular):
        bird_certificate([Q], 2)


@pytest.mark.parametrize("n,k", [(7, 2), (10, 3), (13, 4), (16, 5)])
def test_bird_perturb_is_certified_and_nice(n, k):
    B, cert = bird_perturb(n, k, seed=1)
    assert cert.ok and is_k_nice(B, k).ok
    assert not np.allclose(B.xy, regular_ngon(n).xy)


def test_segments_intersect_against_parametric_oracle():
    rng = np.random.default_rng(7)
    for _ in range(300):
        a0, a1, b0, b1 = rng.normal(size=(4, 2))
        M = np.column_stack([a1 - a0, b0 - b1])
        st_ = np.linalg.solve(M, b0 - a0)
        expected = bool(np.all((st_ > 0) & (st_ < 1)))
        assert bool(segments_intersect(a0, a1, b0, b1)) == expected


def test_embedded_and_winding():
    assert is_embedded(regular_ngon(8).xy)
    assert not is_embedded(star_relabel(regular_ngon(7), 2).xy)
    xy = regular_ngon(6).xy
    assert list(winding_numbers(xy, np.array([[0, 0], [3, 0.0]]))) == [1, 0]


def test_polygon_vertices_are_canonical():
    P = LabeledPolygon(np.array([[2.0, 0, -2.0], [0, 3.0, 3.0], [-1.0, -1.0, 1.0]]))
    assert np.allclose(np.linalg.norm(P.vertices, axis=1), 1)
    assert np.all(P.vertices[:, 2] > 0)
    assert np.allclose(P.xy, [[-1, 0], [0, 1], [-1, -1]])
    with pytest.raises(ValueError):
        P.vertices[0, 0] = 1.0
