import numpy as np
import pytest
from hypothesis import given, strategies as st

from pentabird.errors import DegenerateTriple, WrongN
from pentabird.glick import (
    collapse_fixed_point_check,
    fixed_point_residual,
    glick_invariance_check,
    glick_operator,
    invariant_parameters,
    multi_k_collapse_survey,
)
from pentabird.polygon import LabeledPolygon, bird_perturb, random_convex_ngon, regular_ngon
from pentabird.projective import lift

from conftest import seeds


def operator_by_sum(V, a, b):
    """Oracle: apply the defining sum to the basis vectors one determinant at a time."""
    n = len(V)
    G = np.zeros((3, 3))
    for col, e in enumerate(np.eye(3)):
        for i in range(n):
            num = np.linalg.det(np.array([V[(i - a) % n], e, V[(i + b) % n]]))
            den = np.linalg.det(np.array([V[(i - a) % n], V[i], V[(i + b) % n]]))
            G[:, col] += num / den * V[i]
    return G


@pytest.mark.parametrize("a,b", [(1, 1), (2, 2), (3, 3), (1, 3)])
def test_operator_matches_determinant_sum(a, b):
    P = random_convex_ngon(10, seed=a + 7 * b)
    V = lift(P.xy)
    G = glick_operator(P, a, b, lifts=V).matrix
    assert np.abs(G - operator_by_sum(V, a, b)).max() < 1e-10 * np.abs(G).max()


@given(seeds, st.integers(7, 15), st.integers(1, 3), st.integers(1, 3))
def test_lift_invariance(seed, n, a, b):
    rng = np.random.default_rng(seed)
    P = random_convex_ngon(n, seed=seed)
    G = glick_operator(P, a, b).matrix
    scaled = P.vertices * rng.uniform(0.1, 10, size=(n, 1)) * rng.choice([-1, 1], size=(n, 1))
    assert np.abs(glick_operator(P, a, b, lifts=scaled).matrix - G).max() <= 1e-12 * np.abs(G).max()


def test_regular_operator_commutes_with_rotation():
    n = 9
    c, s = np.cos(2 * np.pi / n), np.sin(2 * np.pi / n)
    R = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
    for a, b in ((1, 1), (2, 2), (3, 3)):
        G = glick_operator(regular_ngon(n), a, b).matrix
        assert np.abs(G @ R - R @ G).max() < 1e-10 * np.abs(G).max()


def test_collinear_triple_is_reported():
    xy = np.array([[0, 0], [1, 0], [2, 0], [1, 1.0], [0.2, 1.0]])
    with pytest.raises(DegenerateTriple):
        glick_operator(LabeledPolygon.from_xy(xy), 1, 1)


def test_invariant_parameters():
    assert invariant_parameters(7, 2) == (2, 2)
    assert invariant_parameters(8, 2) == (3, 3)
    assert invariant_parameters(9, 1) == (1, 1)
    assert invariant_parameters(9, 2) is None


def test_invariance_examples():
    assert glick_invariance_check(random_convex_ngon(7, seed=1), 1).passed
    B7, _ = bird_perturb(7, 2, seed=2)
    rep = glick_invariance_check(B7, 2)
    assert rep.passed and (rep.a, rep.b) == (2, 2)
    B8, _ = bird_perturb(8, 2, seed=3)
    rep = glick_invariance_check(B8, 2)
    assert rep.passed and (rep.a, rep.b) == (3, 3)
    with pytest.raises(WrongN):
        glick_invariance_check(random_convex_ngon(9, seed=0), 2)


@pytest.mark.parametrize("n,k", [(7, 2), (10, 3), (5, 1), (8, 2)])
def test_collapse_point_is_fixed(n, k):
    rep = collapse_fixed_point_check(random_convex_ngon(n, seed=n), k, tol=1e-10)
    assert rep.converged and rep.radius < 1e-8
    assert rep.residual < 1e-5


def test_fixed_point_residual_oracle():
    G = np.diag([1.0, 2.0, 3.0])
    assert fixed_point_residual(G, [0, 0, 1.0]) < 1e-16
    assert fixed_point_residual(G, [1.0, 1.0, 0]) > 0.1


def test_survey():
    rep = multi_k_collapse_survey(regular_ngon(10), tol=1e-10)
    assert rep.ks == (1, 2, 3)
    assert np.abs(rep.points).max() < 1e-9
    P = random_convex_ngon(13, seed=5)
    rep = multi_k_collapse_survey(P, tol=1e-9, max_iter=2000)
    assert len(rep.points) == 4 and rep.collinearity > 0
    assert multi_k_collapse_survey(random_convex_ngon(7, seed=1)).ks == (1, 2)
