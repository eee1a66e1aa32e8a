import numpy as np
import pytest
from hypothesis import given

from pentabird.bird import polygon_contains_polygon, soul
from pentabird.dynamics import (
    FACTORED_SHIFT,
    backward_exhaustion_probe,
    collapse_estimate,
    d_map,
    delta_k_direct,
    delta_k_factored,
    delta_k_inverse,
    iterate,
    star_conjugacy_check,
)
from pentabird.energy import chi_k
from pentabird.polygon import (
    LabeledPolygon,
    bird_perturb,
    diameter,
    is_strictly_convex,
    is_strictly_star_shaped,
    random_convex_ngon,
    regular_ngon,
)
from pentabird.projective import ProjMap

from conftest import nice_pairs, seeds


def intersect_affine(p0, p1, q0, q1):
    """Oracle: solve p0 + s (p1 - p0) = q0 + t (q1 - q0)."""
    M = np.column_stack([p1 - p0, q0 - q1])
    s, _ = np.linalg.solve(M, q0 - p0)
    return p0 + s * (p1 - p0)


def direct_oracle(xy, k):
    n = len(xy)
    return np.array([
        intersect_affine(xy[j], xy[(j + k + 1) % n], xy[(j + 1) % n], xy[(j - k) % n]) for j in range(n)
    ])


def on_circle_equally_spaced(xy, center=(0.0, 0.0), tol=1e-12):
    z = (xy[:, 0] - center[0]) + 1j * (xy[:, 1] - center[1])
    r = np.abs(z)
    steps = np.angle(np.roll(z, -1) / z)
    return np.ptp(r) < tol * r.mean() and np.ptp(steps) < tol


@given(nice_pairs())
def test_direct_map_matches_line_intersection_oracle(case):
    P, k = case
    Q = delta_k_direct(P, k)
    ref = direct_oracle(P.xy, k)
    assert np.abs(Q.xy - ref).max() < 1e-9 * max(1.0, np.abs(ref).max())


@given(nice_pairs())
def test_projective_equivariance(case):
    P, k = case
    M = ProjMap.random(np.random.default_rng(P.n))
    MP = LabeledPolygon(M.apply_points(P.vertices), P.kind, P.orientation)
    lhs = delta_k_direct(MP, k)
    rhs = LabeledPolygon(M.apply_points(delta_k_direct(P, k).vertices))
    assert lhs.distance(rhs) < 1e-9


def test_d_map_is_an_involution():
    P = random_convex_ngon(9, seed=3)
    for m in (1, 2, 3, 4):
        assert d_map(d_map(P, m), m).distance(P) < 1e-9
        assert d_map(P, m).kind == "line"


def test_d_map_of_regular_is_regular_dual():
    L = d_map(regular_ngon(11), 3).vertices
    dist = np.abs(L[:, 2]) / np.hypot(L[:, 0], L[:, 1])
    assert np.ptp(dist) < 1e-12
    normals = L[:, :2] / np.hypot(L[:, 0], L[:, 1])[:, None]
    cosines = np.sum(normals * np.roll(normals, -1, axis=0), axis=1)
    assert np.ptp(np.abs(cosines)) < 1e-12


def test_pentagram_of_convex_pentagon():
    P = random_convex_ngon(5, seed=8)
    Q = delta_k_direct(P, 1)
    assert is_strictly_convex(Q.xy)
    assert polygon_contains_polygon(P.xy, Q.xy)


@pytest.mark.parametrize("n,k", [(7, 2), (10, 3), (13, 4)])
def test_regular_maps_to_regular(n, k):
    Q = delta_k_direct(regular_ngon(n), k)
    assert on_circle_equally_spaced(Q.xy)
    assert diameter(Q.xy) < diameter(regular_ngon(n).xy)


def test_bird_image_is_star_shaped_inside():
    B, _ = bird_perturb(7, 2, seed=5)
    Q = delta_k_direct(B, 2)
    assert polygon_contains_polygon(B.xy, Q.xy)
    c = soul(Q, 2).interior_point()
    assert is_strictly_star_shaped(Q, c)


def test_factored_shift():
    assert FACTORED_SHIFT == 1
    P = random_convex_ngon(10, seed=6)
    F, D = delta_k_factored(P, 2), delta_k_direct(P, 2)
    for m in range(10):
        assert np.linalg.norm(np.cross(F.vertex(m), D.vertex(m - 1))) < 1e-12
    R = regular_ngon(10)
    a, b = delta_k_factored(R, 2).xy, delta_k_direct(R, 2).xy
    gaps = np.linalg.norm(a[:, None] - b[None], axis=-1).min(axis=1)
    assert gaps.max() < 1e-12


def test_inverse_round_trips():
    P = random_convex_ngon(11, seed=2)
    assert delta_k_inverse(delta_k_direct(P, 3), 3).distance(P) < 1e-8
    assert delta_k_direct(delta_k_inverse(P, 3), 3).distance(P) < 1e-8


def test_inverse_is_the_reversed_composition():
    rng = np.random.default_rng(1)
    for _ in range(100):
        k = int(rng.integers(1, 4))
        n = int(rng.integers(3 * k + 2, 3 * k + 8))
        Q = random_convex_ngon(n, seed=int(rng.integers(2**31)))
        comp = d_map(d_map(Q, k), k + 1)
        # composition through the kinds: point -> line -> point
        assert comp.kind == "point"
        inv = delta_k_inverse(Q, k)
        assert min(comp.shifted(s).distance(inv) for s in range(n)) < 1e-9


@given(nice_pairs())
def test_backward_orbit_grows(case):
    P, k = case
    Q = delta_k_inverse(P, k)
    if Q.is_affine():
        assert diameter(Q.xy) > diameter(P.xy)


def test_orbit_nesting_and_energy():
    B, _ = bird_perturb(13, 4, seed=1)
    rec = iterate(B, 4, 0, 4)
    assert rec.error is None
    for l in range(4):
        assert polygon_contains_polygon(rec.raw(l).xy, rec.raw(l + 1).xy)
    assert np.abs(rec.energies / rec.energies[0] - 1).max() < 1e-9
    assert rec.reconstruction_residual() < 1e-9


def test_regular_orbit_is_self_similar():
    rec = iterate(regular_ngon(10), 3, 0, 6)
    for i in range(len(rec.levels)):
        assert on_circle_equally_spaced(rec.raw(i).xy, tol=1e-9)
        assert on_circle_equally_spaced(rec.frames[i].xy, tol=1e-9)


def test_long_orbit_survives_renormalization():
    P = random_convex_ngon(8, seed=0)
    rec = iterate(P, 2, -20, 200, with_souls=False)
    assert rec.error is None
    assert rec.reconstruction_residual() < 1e-9
    assert np.abs(rec.energies / rec.energies[list(rec.levels).index(0)] - 1).max() < 1e-8


def test_collapse_regular_goes_to_center():
    R = LabeledPolygon.from_xy(2 * regular_ngon(9).xy + np.array([1.0, -3.0]))
    est = collapse_estimate(R, 2)
    assert est.converged and est.nested
    assert np.allclose(est.point, [1.0, -3.0], atol=1e-9)


@given(seeds)
def test_collapse_converges_on_convex(seed):
    P = random_convex_ngon(5 + seed % 12, seed=seed)
    k = 1 + seed % max(1, (P.n - 1) // 3)
    # k = 1 on larger n can contract by only ~0.97 per step, hence the generous cap
    est = collapse_estimate(P, k, tol=1e-9, max_iter=2000)
    assert est.converged and est.nested and est.radius < 1e-9


def test_star_conjugacy():
    for n, k in ((10, 3), (7, 2)):
        for seed in range(10):
            rep = star_conjugacy_check(random_convex_ngon(n, seed=seed), k, steps=2)
            assert rep.passed
        assert star_conjugacy_check(regular_ngon(n), k).passed


def test_backward_exhaustion():
    B, _ = bird_perturb(10, 3, seed=2)
    rep = backward_exhaustion_probe(B, 3, radius=1e3, max_steps=200)
    assert rep.reached and rep.chart_ok
    assert all(b >= a for a, b in zip(rep.inradii, rep.inradii[1:]))
