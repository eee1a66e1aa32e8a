"""The k-energy, its dual through coefficient sequences, and identity checks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import d_map, delta_k_direct
from .errors import CrossRatioPole, ParamError, RankDeficient, SampleDegenerate, ZeroCoefficient
from .polygon import LabeledPolygon
from .projective import DEFAULT_TOL, Tolerance, bracket, cross_ratio, lift, normalize, slope


def energy_offsets(k: int):
    """Neighbour offsets of the four lines at a vertex, in cross-ratio order."""
    return (-k, -k - 1, k + 1, k)


def chi_k_factors(P: LabeledPolygon, k: int, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Per-vertex pencil cross ratios.

    The four lines through vertex i are cut by the transversal whose
    coordinates equal those of the vertex; the resulting collinear points are
    compared with the bracket form.  For a PolyLine the same algebra runs in
    the dual plane.
    """
    t = P.vertices
    X = [np.cross(np.cross(t, P.rolled(o)), t) for o in energy_offsets(k)]
    num = bracket(X[0], X[1], t) * bracket(X[2], X[3], t)
    den = bracket(X[0], X[2], t) * bracket(X[1], X[3], t)
    scale = np.prod([np.linalg.norm(x, axis=1) for x in X], axis=0)
    bad = np.flatnonzero(np.abs(den) <= tol.eps_det * scale)
    if len(bad):
        raise CrossRatioPole("vanishing pencil denominator", int(bad[0]))
    return num / den


def chi_k(P: LabeledPolygon, k: int, tol: Tolerance = DEFAULT_TOL) -> float:
    return float(np.prod(chi_k_factors(P, k, tol)))


def chi_k_slopes(P: LabeledPolygon, k: int) -> float:
    """Energy from raw slopes of the four lines (affine PolyPoints only).

    Independent of :func:`chi_k`; breaks down when a line is vertical.
    """
    out = 1.0
    for i in range(P.n):
        lines = [np.cross(P.vertex(i), P.vertex(i + o)) for o in energy_offsets(k)]
        out *= cross_ratio(*[slope(l) for l in lines])
    return out


# coefficient sequences

@dataclass(frozen=True)
class CoefficientQuadruples:
    """Row i holds (a_i, b_i, c_i, d_i) with
    a_i V_i + b_i V_{i+k} + c_i V_{i+k+1} + d_i V_{i+2k+1} = 0."""

    k: int
    coeffs: np.ndarray
    residual: float

    @property
    def a(self):
        return self.coeffs[:, 0]

    @property
    def b(self):
        return self.coeffs[:, 1]

    @property
    def c(self):
        return self.coeffs[:, 2]

    @property
    def d(self):
        return self.coeffs[:, 3]


def default_lifts(P: LabeledPolygon) -> np.ndarray:
    """Lifts with third coordinate 1 when possible, else the stored unit vectors."""
    if P.is_affine():
        return lift(P.xy)
    return np.array(P.vertices)


def solve_coefficients(P: LabeledPolygon, k: int, lifts=None, tol: Tolerance = DEFAULT_TOL) -> CoefficientQuadruples:
    """Null vector of [V_i, V_{i+k}, V_{i+k+1}, V_{i+2k+1}] by signed 3x3 minors."""
    V = default_lifts(P) if lifts is None else np.asarray(lifts, dtype=float)
    cols = [np.roll(V, -o, axis=0) for o in (0, k, k + 1, 2 * k + 1)]
    det = lambda x, y, z: np.sum(np.cross(x, y) * z, axis=1)
    q = np.column_stack([
        det(cols[1], cols[2], cols[3]),
        -det(cols[0], cols[2], cols[3]),
        det(cols[0], cols[1], cols[3]),
        -det(cols[0], cols[1], cols[2]),
    ])
    norms = np.linalg.norm(q, axis=1)
    scale = np.prod([np.linalg.norm(c, axis=1) for c in cols[:3]], axis=0)
    bad = np.flatnonzero(norms <= tol.eps_det * scale)
    if len(bad):
        raise RankDeficient("coefficient system has nullity > 1", int(bad[0]))
    q = q / norms[:, None]
    lead = q[np.arange(len(q)), np.argmax(np.abs(q) > tol.eps_det, axis=1)]
    q *= np.sign(lead)[:, None]
    res = sum(q[:, j, None] * cols[j] for j in range(4))
    residual = float(np.abs(res).max() / max(np.abs(V).max(), 1e-300))
    return CoefficientQuadruples(k, q, residual)


def coefficient_ratios(Q: CoefficientQuadruples, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Per-index a_i d_i / (b_i c_i).

    Rescaling lift j by s_j multiplies entry i by
    s_{i+k} s_{i+k+1} / (s_i s_{i+2k+1}), so only the product over i is
    independent of the lifts.
    """
    bc = Q.b * Q.c
    bad = np.flatnonzero((np.abs(Q.coeffs) <= tol.eps_det).any(axis=1))
    if len(bad):
        raise ZeroCoefficient("vanishing coefficient", int(bad[0]))
    return Q.a * Q.d / bc


def mu_k(P: LabeledPolygon, k: int, lifts=None, tol: Tolerance = DEFAULT_TOL) -> float:
    return float(np.prod(coefficient_ratios(solve_coefficients(P, k, lifts, tol), tol)))


@dataclass(frozen=True)
class RefactorizationReport:
    mu: float
    mu_image: float
    residual: float
    head_ratios: np.ndarray
    tail_ratios: np.ndarray
    passed: bool

    @property
    def head_product(self) -> float:
        return float(np.prod(self.head_ratios))

    @property
    def tail_product(self) -> float:
        return float(np.prod(self.tail_ratios))


def refactorization_product_check(P: LabeledPolygon, k: int, lifts=None, tol: float = 1e-8) -> RefactorizationReport:
    """Compare coefficient sequences of P and Delta_k(P).

    Per-index identities are only defined up to the scale of each quadruple,
    so they are reported as ratios
        head_i = a~_i b_i / (b~_i a_{i+k}),   tail_i = c~_i d_{i+k+1} / (d~_i c_{i+2k+1});
    their products are scale free.  The pass criterion is the scale-free
    equality of the two coefficient products.
    """
    Q = solve_coefficients(P, k, lifts)
    img = delta_k_direct(P, k)
    Qt = solve_coefficients(img, k)
    sh = lambda x, s: np.roll(x, -s)
    head = Qt.a * Q.b / (Qt.b * sh(Q.a, k))
    tail = Qt.c * sh(Q.d, k + 1) / (Qt.d * sh(Q.c, 2 * k + 1))
    mu = float(np.prod(coefficient_ratios(Q)))
    mu_img = float(np.prod(coefficient_ratios(Qt)))
    res = abs(mu_img / mu - 1.0)
    return RefactorizationReport(mu, mu_img, res, head, tail, res < tol)


# sliding families and the factor lemmas

def sliding_family(P: LabeledPolygon, a: int, b: int, t: float) -> LabeledPolygon:
    """Replace vertex a by (1-t) P_a + t P_b in the affine chart."""
    xy = P.xy.copy()
    n = P.n
    xy[a % n] = (1 - t) * xy[a % n] + t * xy[b % n]
    return LabeledPolygon(lift(xy), P.kind, P.orientation)


@dataclass(frozen=True)
class FactorLemmaReport:
    which: str
    t: np.ndarray
    f: np.ndarray
    g: np.ndarray
    constancy: float
    ratio: float
    fit_residual_f: float
    fit_residual_g: float
    passed: bool


def rational_fit_residual(t, y, deg: int = 4) -> float:
    """Max relative error of the least-squares p/q fit with deg p = deg q = ``deg``."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    T = np.vander(t, deg + 1, increasing=True)
    A = np.hstack([T, -y[:, None] * T])
    A /= np.linalg.norm(A, axis=1, keepdims=True)
    _, _, vt = np.linalg.svd(A)
    c = vt[-1]
    p, q = T @ c[: deg + 1], T @ c[deg + 1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        err = np.abs(p / q - y) / np.maximum(np.abs(y), 1e-300)
    return float(np.nanmax(err)) if np.any(np.isfinite(err)) else np.inf


def factor_lemma_check(P: LabeledPolygon, k: int, which: str = "I", samples: int = 25,
                       seed=0, vertex: int = 0, tol: float = 1e-7) -> FactorLemmaReport:
    """Slide one vertex along a k-diagonal (I) or (k+1)-diagonal (II) and compare
    f(t) = chi_k(P(t)) with g(t) = chi_k(D_m(P(t)))."""
    if which not in ("I", "II"):
        raise ParamError("which must be 'I' or 'II'")
    if samples < 25:
        raise ParamError("need at least 25 samples")
    m = k if which == "I" else k + 1
    rng = np.random.default_rng(seed)
    ts, fs, gs = [], [], []
    draws = 0
    while len(ts) < samples:
        draws += 1
        if draws > samples + 100:
            raise SampleDegenerate(f"too many degenerate samples (last t={t:.6g})")
        t = rng.uniform(-0.45, 0.9)
        Pt = sliding_family(P, vertex, vertex + m, t)
        try:
            f = chi_k(Pt, k)
            g = chi_k(d_map(Pt, m), k)
        except ArithmeticError:
            continue
        if not (np.isfinite(f) and np.isfinite(g)) or g == 0:
            continue
        ts.append(t)
        fs.append(f)
        gs.append(g)
    ts, fs, gs = map(np.array, (ts, fs, gs))
    r = fs / gs
    med = float(np.median(r))
    dev = float(np.max(np.abs(r / med - 1)))
    return FactorLemmaReport(which, ts, fs, gs, dev, med,
                             rational_fit_residual(ts, fs), rational_fit_residual(ts, gs), dev < tol)
