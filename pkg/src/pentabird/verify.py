"""Randomized property suites.

Every property reports ``{property, samples, max_residual, pass}``.  Suites
are deterministic for a given seed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bird, dynamics, energy, glick, polygon, projective, triangulation
from .polygon import LabeledPolygon, bird_perturb, random_convex_ngon, regular_ngon


@dataclass(frozen=True)
class PropertyResult:
    property: str
    samples: int
    max_residual: float
    passed: bool

    def to_dict(self) -> dict:
        return {"property": self.property, "samples": self.samples,
                "max_residual": self.max_residual, "pass": self.passed}


def _result(name, residuals, tol) -> PropertyResult:
    r = np.asarray(residuals, dtype=float)
    worst = float(np.max(r)) if len(r) else 0.0
    return PropertyResult(name, len(r), worst, bool(len(r) and np.all(r < tol)))


def _count(name, flags) -> PropertyResult:
    """Boolean property: residual is the number of failures."""
    flags = list(flags)
    bad = sum(1 for f in flags if not f)
    return PropertyResult(name, len(flags), float(bad), bad == 0)


def projective_image(P: LabeledPolygon, rng) -> LabeledPolygon:
    """A random projective image that stays in the affine chart."""
    while True:
        M = projective.ProjMap.random(rng, spread=0.15)
        V = M.apply_points(P.vertices)
        if np.all(V[:, 2] > 0.05 * np.linalg.norm(V, axis=1)):
            return LabeledPolygon(V, P.kind)


ENERGY_PAIRS = [(1, n) for n in range(5, 13)] + [(2, n) for n in range(7, 17)] \
    + [(3, n) for n in range(10, 21)] + [(4, n) for n in range(13, 21)]


def suite_projective(rng) -> list:
    out = []
    res = []
    for _ in range(1000):
        p, q, r = rng.normal(size=(3, 3))
        x = projective.meet(projective.join(p, q), projective.join(p, r))
        res.append(np.linalg.norm(np.cross(x, projective.normalize(p))))
    out.append(_result("join/meet adjunction", res, 1e-9))
    res = []
    for _ in range(1000):
        c = projective.lift(rng.uniform(-1, 1, 2))
        dirs = rng.normal(size=(4, 3))
        L = np.cross(dirs, c)
        M = projective.ProjMap.random(rng)
        a = projective.pencil_cross_ratio(L)
        b = projective.pencil_cross_ratio(M.apply_lines(L))
        res.append(abs(b / a - 1))
    out.append(_result("pencil cross ratio is projectively invariant", res, 1e-9))
    v = rng.normal(size=(1000, 3))
    u = projective.normalize(v)
    out.append(_result("normalization is idempotent", np.abs(projective.normalize(u) - u).max(axis=1), 1e-300))
    return out


def suite_polygon(rng) -> list:
    out = []
    flags = []
    for _ in range(100):
        # n = 4 is excluded: offsets -2 and +2 name the same vertex, so no quadrilateral is 1-nice
        n = int(rng.integers(5, 41))
        P = random_convex_ngon(n, seed=int(rng.integers(2**31)))
        flags += [polygon.is_k_nice(P, k).ok for k in range(1, (n - 1) // 3 + 1)]
        flags += [polygon.classify_diagonals(P, k).all_regular for k in range(1, (n - 1) // 3 + 1)]
    out.append(_count("convex polygons are k-nice with regular diagonals", flags))
    flags = []
    for i in range(100):
        n = int(rng.integers(5, 14))
        xy = regular_ngon(n).xy * rng.uniform(0.3, 1.0, n)[:, None]
        if not polygon.is_embedded(xy):
            continue
        x = rng.uniform(-0.2, 0.2, 2)
        if polygon.boundary_distance(xy, x)[0] < 1e-6:
            continue
        flags.append(polygon.is_strictly_star_shaped(xy, x) == polygon.star_shaped_by_rays(xy, x))
    out.append(_count("star-shapedness agrees with ray casting", flags))
    flags = []
    for _ in range(50):
        n = int(rng.integers(5, 30))
        P = random_convex_ngon(n, seed=int(rng.integers(2**31)))
        r = int(rng.choice([r for r in range(1, n) if np.gcd(r, n) == 1]))
        Q = polygon.star_relabel(polygon.star_relabel(P, r), pow(r, -1, n))
        flags.append(Q.distance(P) == 0.0)
    out.append(_count("star relabel by r then r^-1 is the identity", flags))
    return out


def suite_dynamics(rng) -> list:
    out = []
    pairs = [(1, 5), (1, 8), (2, 7), (2, 12), (3, 10), (3, 16), (4, 13)]
    inv, fac, rt = [], [], []
    for s in range(500):
        k, n = pairs[s % len(pairs)]
        P = random_convex_ngon(n, seed=int(rng.integers(2**31)))
        m = int(rng.integers(1, n))
        if 2 * m != n:
            inv.append(dynamics.d_map(dynamics.d_map(P, m), m).distance(P))
        f = dynamics.delta_k_factored(P, k)
        fac.append(f.distance(dynamics.delta_k_direct(P, k).shifted(-dynamics.FACTORED_SHIFT)))
        if s < 200:
            rt.append(dynamics.delta_k_direct(dynamics.delta_k_inverse(P, k), k).distance(P))
    out.append(_result("D_m is an involution", inv, 1e-9))
    out.append(_result("factored map equals direct map up to the frozen shift", fac, 1e-9))
    out.append(_result("inverse round trip", rt, 1e-8))
    res = []
    for k, n in [(1, 5), (2, 7), (3, 10)]:
        P = random_convex_ngon(n, seed=int(rng.integers(2**31)))
        rec = dynamics.iterate(P, k, 0, 200, renormalize=True, with_souls=False)
        res.append(float(np.max(np.abs(rec.energies / rec.energies[0] - 1))))
    out.append(_result("energy constant along 200-step renormalized orbits", res, 1e-9))
    res = []
    for _ in range(50):
        for k in (2, 3):
            P = random_convex_ngon(3 * k + 1, seed=int(rng.integers(2**31)))
            rep = dynamics.star_conjugacy_check(P, k, steps=2)
            res.append(max(rep.point_residual, rep.energy_residual))
    out.append(_result("star relabel conjugates Delta_k to Delta_1", res, 1e-8))
    flags = []
    for s in range(20):
        k, n = [(2, 7), (3, 10), (4, 13)][s % 3]
        B, _ = bird_perturb(n, k, seed=int(rng.integers(2**31)))
        flags.append(bird.polygon_contains_polygon(B.xy, dynamics.delta_k_direct(B, k).xy))
    out.append(_count("Delta_k(bird) lies inside the bird", flags))
    return out


def suite_energy(rng) -> list:
    out = []
    inv, dk, dk1, cover, mu, mu_inv = [], [], [], [], [], []
    for s in range(1000):
        k, n = ENERGY_PAIRS[s % len(ENERGY_PAIRS)]
        P = random_convex_ngon(n, seed=int(rng.integers(2**31)))
        if s % 2:
            P = projective_image(P, rng)
        c = energy.chi_k(P, k)
        inv.append(abs(energy.chi_k(dynamics.delta_k_direct(P, k), k) / c - 1))
        if s < 200:
            dk.append(abs(energy.chi_k(dynamics.d_map(P, k), k) / c - 1))
            dk1.append(abs(energy.chi_k(dynamics.d_map(P, k + 1), k) / c - 1))
            m = energy.mu_k(P, k)
            mu.append(abs(m / energy.chi_k(dynamics.d_map(P, k + 1), k) - 1))
            mu_inv.append(abs(energy.mu_k(dynamics.delta_k_direct(P, k), k) / m - 1))
        if s < 50:
            for mult in (2, 3):
                cover.append(abs(energy.chi_k(polygon.cyclic_cover(P, mult), k) / c ** mult - 1))
    out.append(_result("chi_k is Delta_k invariant", inv, 1e-9))
    out.append(_result("chi_k is D_k invariant", dk, 1e-9))
    out.append(_result("chi_k is D_{k+1} invariant", dk1, 1e-9))
    out.append(_result("cyclic cover power law", cover, 1e-8))
    out.append(_result("mu_k equals chi_k after D_{k+1}", mu, 1e-8))
    out.append(_result("mu_k is Delta_k invariant", mu_inv, 1e-8))
    res = []
    for k, n in [(2, 12), (3, 14)]:
        for which in ("I", "II"):
            P = random_convex_ngon(n, seed=int(rng.integers(2**31)))
            res.append(energy.factor_lemma_check(P, k, which, seed=int(rng.integers(2**31))).constancy)
    out.append(_result("factor lemma ratio is constant", res, 1e-7))
    return out


def suite_bird(rng) -> list:
    out = []
    flags, area, struct, ratio = [], [], [], []
    pairs = [(2, 7), (2, 10), (3, 10), (4, 13), (5, 16)]
    for s in range(20):
        k, n = pairs[s % len(pairs)]
        B, _ = bird_perturb(n, k, seed=int(rng.integers(2**31)))
        S = bird.soul(B, k)
        flags.append(S.has_interior() and bird.polygon_contains_points(B.xy, S.vertices).all()
                     and bird.star_shaped_wrt_region(B, S, 20, seed=s))
        fr = bird.feather_report(B, k)
        struct.append(fr.inside and fr.disjoint and fr.tips_inside
                      and not bird.detect_opposing(B, k) and not bird.detect_interlaced(B, k))
        area.append(fr.area_residual)
    out.append(_count("soul has interior, lies inside, and sees the whole bird", flags))
    out.append(_count("feathers, opposing and interlaced diagonals", struct))
    out.append(_result("annulus area identity", area, 1e-8))
    res = []
    for s in range(10):
        n = int(rng.integers(7, 13))
        P = random_convex_ngon(n, seed=int(rng.integers(2**31)))
        k = 1 + s % ((n - 1) // 3)
        X = P
        for _ in range(n):
            X = dynamics.delta_k_direct(X, k)
        h1, h2 = bird.hull_region(X.xy), bird.hull_region(P.xy)
        d = bird.affine_diameter_ratio(h1, h2)
        res.append(max(h1.diameter / h2.diameter - d, 0.0))
        ratio.append(bird.affine_diameter_ratio(bird.soul(X, k), bird.soul(P, k)) < 1)
    out.append(_result("diameter ratio bounded by affine diameter ratio", res, 1e-9))
    out.append(_count("affine diameter ratio of souls after n steps is below 1", ratio))
    flags = []
    for s in range(6):
        k, n = [(2, 9), (2, 7), (3, 10)][s % 3]
        P = random_convex_ngon(n, seed=int(rng.integers(2**31)))
        flags.append(bird.soul_nesting_check(P, k, rays=720).passed)
    out.append(_count("soul nesting chain", flags))
    return out


def suite_triangulation(rng) -> list:
    out = []
    area, deg, spiral = [], [], []
    for k, n, layers in [(2, 7, 8), (5, 16, 18), (2, 10, 12), (3, 10, 11)]:
        B, _ = bird_perturb(n, k, seed=int(rng.integers(2**31)))
        T = triangulation.build_triangulation(B, k, layers)
        area.append(float(T.area_residuals().max()))
        deg.append(T.interior_degrees_ok() and not any(T.overlapping_pairs(l) for l in range(layers)))
        pair = triangulation.spiral_paths(T, int(rng.integers(n)))
        spiral.append(pair.left.locally_convex and pair.right.locally_convex and not pair.early_crossing
                      and triangulation.petal_contains_orbit(T, pair))
    out.append(_result("layer area identity", area, 1e-8))
    out.append(_count("degree six and disjoint triangles", deg))
    out.append(_count("spirals are locally convex and bound a petal", spiral))
    return out


def suite_glick(rng) -> list:
    out = []
    lift_res, k1, kk = [], [], []
    for s in range(100):
        n = int(rng.integers(7, 16))  # keeps i-a, i, i+b distinct for a, b <= 3
        P = random_convex_ngon(n, seed=int(rng.integers(2**31)))
        a, b = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        G = glick.glick_operator(P, a, b).matrix
        scaled = P.vertices * rng.uniform(0.1, 10, n)[:, None]
        lift_res.append(np.abs(glick.glick_operator(P, a, b, lifts=scaled).matrix - G).max() / np.abs(G).max())
        k1.append(glick.glick_invariance_check(P, 1).residual)
        for k, m in ((2, 7), (3, 10), (2, 8), (3, 11)):
            if s < 25:
                Q = random_convex_ngon(m, seed=int(rng.integers(2**31)))
                kk.append(glick.glick_invariance_check(Q, k).residual)
    out.append(_result("operator is lift invariant", lift_res, 1e-12))
    out.append(_result("k=1 operator is Delta_1 invariant", k1, 1e-8))
    out.append(_result("operators for n=3k+1, 3k+2 are Delta_k invariant", kk, 1e-8))
    res = []
    for k, n in [(2, 7), (3, 10), (1, 5), (2, 8)]:
        P = random_convex_ngon(n, seed=int(rng.integers(2**31)))
        rep = glick.collapse_fixed_point_check(P, k, tol=1e-10)
        res.append(rep.residual if rep.radius < 1e-8 else np.inf)
    out.append(_result("collapse point is a projective fixed point", res, 1e-5))
    return out


SUITES = {
    "projective": suite_projective,
    "polygon": suite_polygon,
    "dynamics": suite_dynamics,
    "energy": suite_energy,
    "bird": suite_bird,
    "triangulation": suite_triangulation,
    "glick": suite_glick,
}


def run_suite(name: str = "all", seed: int = 0) -> list:
    names = list(SUITES) if name == "all" else [name]
    out = []
    for nm in names:
        if nm not in SUITES:
            raise ValueError(f"unknown suite {nm!r}; choose from {['all'] + list(SUITES)}")
        rng = np.random.default_rng([seed, list(SUITES).index(nm)])
        out += [dict(r.to_dict(), suite=nm) for r in SUITES[nm](rng)]
    return out
