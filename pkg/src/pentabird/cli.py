"""Command-line interface.

Exit codes: 0 pass, 1 property failure, 2 unreadable input, 3 bad parameters,
4 geometric degeneracy.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from . import io as pio
from .bird import feather_report, feathers, polygon_contains_points, soul, star_shaped_wrt_region
from .dynamics import backward_exhaustion_probe, collapse_estimate, delta_k_direct, iterate
from .energy import chi_k, mu_k
from .errors import DegeneracyError, ParamError, ParseError
from .glick import collapse_fixed_point_check, glick_invariance_check, glick_operator, invariant_parameters
from .polygon import bird_perturb, random_convex_ngon, regular_ngon
from .render import feather_scene, orbit_scene, render_svg, triangulation_scene
from .triangulation import build_triangulation
from .verify import SUITES, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_PARSE, EXIT_PARAMS, EXIT_DEGENERATE = 0, 1, 2, 3, 4


def _warn(msg: str):
    print(f"warning: {msg}", file=sys.stderr)


def _emit(text: str, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _provenance(args, **extra) -> dict:
    params = {key: getattr(args, key) for key in ("k", "n", "seed", "steps", "layers", "tol")
              if getattr(args, key, None) is not None}
    if getattr(args, "inp", None):
        params["input"] = args.inp
    return dict({"tool": "pentabird", "version": __version__, "command": args.command, "params": params}, **extra)


def _check_params(args):
    if args.k is not None and args.k < 1:
        raise ParamError(f"--k must be positive, got {args.k}")
    if args.n is not None and args.n < 3:
        raise ParamError(f"--n must be at least 3, got {args.n}")
    for key in ("steps", "layers"):
        v = getattr(args, key, None)
        if v is not None and v < 1:
            raise ParamError(f"--{key} must be positive, got {v}")
    if args.tol is not None and not args.tol > 0:
        raise ParamError(f"--tol must be positive, got {args.tol}")


def _input_polygon(args):
    """Polygon from --in, or a certified bird for (--n, --k, --seed)."""
    if args.inp:
        P, _ = pio.read_polygon(args.inp)
        if args.n is not None and args.n != P.n:
            raise ParamError(f"--n {args.n} does not match the input polygon (n={P.n})")
        return P
    n = args.n if args.n is not None else 3 * args.k + 1
    P, _ = bird_perturb(n, args.k, seed=args.seed)
    return P


def _warn_small_n(n: int, k: int):
    if n <= 3 * k:
        _warn(f"n={n} <= 3k={3 * k}: there are no {k}-birds with {n} vertices")


# subcommands

def cmd_generate(args) -> int:
    if args.n is None:
        raise ParamError("generate needs --n")
    k = args.k if args.k is not None else 1
    extra = {"generator": args.type, "seed": args.seed}
    if args.type == "regular":
        P = regular_ngon(args.n)
    elif args.type == "convex":
        P = random_convex_ngon(args.n, seed=args.seed)
    else:
        P, cert = bird_perturb(args.n, k, seed=args.seed)
        extra["certificate"] = {"ok": cert.ok, "intervals_checked": cert.intervals_checked,
                                "min_step": cert.min_step, "note": cert.note}
    if args.k is not None:
        _warn_small_n(args.n, k)
    _emit(pio.polygon_to_json(P, _provenance(args, **extra)), args.out)
    return EXIT_PASS


def cmd_map(args) -> int:
    P = _input_polygon(args)
    _warn_small_n(P.n, args.k)
    steps = args.steps if args.steps is not None else 5
    tol = args.tol if args.tol is not None else 1e-9
    rec = iterate(P, args.k, 0, steps)
    e = rec.energies
    drift = float(np.max(np.abs(e / e[0] - 1))) if len(e) and np.isfinite(e).all() else float("nan")
    if args.format == "csv":
        _emit(pio.orbit_to_csv(rec), args.out)
    elif args.format == "json":
        d = dict(pio.orbit_to_dict(rec), energy_drift=drift, provenance=_provenance(args))
        _emit(pio.dumps(d), args.out)
    if args.svg or args.format == "svg":
        svg = render_svg(orbit_scene([rec.raw(i).xy for i in range(len(rec.levels))]))
        _emit(svg, args.svg if args.svg else args.out)
    if rec.error:
        print(f"error: orbit stopped early: {rec.error}", file=sys.stderr)
        return EXIT_DEGENERATE
    ok = np.isfinite(drift) and drift < tol
    print(f"energy drift {drift:.3e} over {steps} steps: {'PASS' if ok else 'FAIL'}", file=sys.stderr)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_energy(args) -> int:
    P = _input_polygon(args)
    _warn_small_n(P.n, args.k)
    tol = args.tol if args.tol is not None else 1e-9
    Q = delta_k_direct(P, args.k)
    c0, c1 = chi_k(P, args.k), chi_k(Q, args.k)
    m0, m1 = mu_k(P, args.k), mu_k(Q, args.k)
    rel = abs(c1 / c0 - 1)
    d = {"k": args.k, "n": P.n, "chi": c0, "chi_image": c1, "chi_relative_change": rel,
         "mu": m0, "mu_image": m1, "mu_relative_change": abs(m1 / m0 - 1),
         "pass": bool(rel < tol), "provenance": _provenance(args)}
    _emit(pio.dumps(d), args.out)
    return EXIT_PASS if d["pass"] else EXIT_FAIL


def cmd_soul(args) -> int:
    P = _input_polygon(args)
    _warn_small_n(P.n, args.k)
    S = soul(P, args.k)
    fr = feather_report(P, args.k)
    inside = bool(not S.empty and polygon_contains_points(P.xy, S.vertices, strict=False).all())
    star = bool(not S.empty and S.has_interior() and star_shaped_wrt_region(P, S, samples=20, seed=args.seed))
    d = {
        "k": args.k, "n": P.n,
        "soul": {"vertices": S.vertices, "area": S.area, "empty": S.empty, "has_interior": S.has_interior()},
        "soul_inside_polygon": inside,
        "star_shaped": star,
        "feathers": {"inside": fr.inside, "disjoint": fr.disjoint, "image_inside": fr.tips_inside,
                     "area_residual": fr.area_residual, "overlapping_pairs": fr.overlapping_pairs},
        "provenance": _provenance(args),
    }
    d["pass"] = bool(S.has_interior() and inside and star and fr.passed)
    _emit(pio.dumps(d), args.out)
    if args.svg:
        img = delta_k_direct(P, args.k)
        _emit(render_svg(feather_scene(P, feathers(P, args.k, img), S, img)), args.svg)
    return EXIT_PASS if d["pass"] else EXIT_FAIL


def cmd_triangulate(args) -> int:
    P = _input_polygon(args)
    _warn_small_n(P.n, args.k)
    layers = args.layers if args.layers is not None else 4
    tri = build_triangulation(P, args.k, layers)
    res = tri.area_residuals()
    overlaps = sum(len(tri.overlapping_pairs(l)) for l in range(layers))
    ok = bool(np.all(res < 1e-8) and overlaps == 0 and (layers < 2 or tri.interior_degrees_ok()))
    if args.format == "svg" and not args.svg:
        _emit(render_svg(triangulation_scene(tri)), args.out)
    else:
        d = dict(pio.triangulation_to_dict(tri), area_residuals=res, overlapping_pairs=overlaps,
                 interior_degree_six=tri.interior_degrees_ok() if layers >= 2 else None,
                 provenance=_provenance(args))
        d["pass"] = ok
        _emit(pio.dumps(d), args.out)
    if args.svg:
        _emit(render_svg(triangulation_scene(tri)), args.svg)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_collapse(args) -> int:
    P = _input_polygon(args)
    _warn_small_n(P.n, args.k)
    tol = args.tol if args.tol is not None else 1e-9
    steps = args.steps if args.steps is not None else 500
    est = collapse_estimate(P, args.k, tol=tol, max_iter=steps)
    back = backward_exhaustion_probe(P, args.k, radius=1e3, max_steps=200)
    d = {
        "k": args.k, "n": P.n,
        "collapse_point": est.point, "radius": est.radius, "iterations": est.iterations,
        "converged": est.converged, "nested": est.nested,
        "backward": {"steps": back.steps, "inradius": back.inradius, "reached": back.reached,
                     "chart_ok": back.chart_ok},
        "provenance": _provenance(args),
    }
    d["pass"] = bool(est.converged and est.nested and back.reached)
    _emit(pio.dumps(d), args.out)
    return EXIT_PASS if d["pass"] else EXIT_FAIL


def cmd_glick(args) -> int:
    P = _input_polygon(args)
    _warn_small_n(P.n, args.k)
    ab = invariant_parameters(P.n, args.k)
    if ab is None:
        raise ParamError(f"no invariant operator for n={P.n}, k={args.k}: need n = 3k+1, 3k+2 or k = 1")
    tol = args.tol if args.tol is not None else 1e-8
    G = glick_operator(P, *ab)
    inv = glick_invariance_check(P, args.k, tol=tol)
    fp = collapse_fixed_point_check(P, args.k, max_iter=args.steps if args.steps is not None else 500)
    d = {
        "k": args.k, "n": P.n, "a": ab[0], "b": ab[1], "operator": G.matrix,
        "invariance_residual": inv.residual,
        "collapse_point": fp.point, "collapse_radius": fp.radius,
        "fixed_point_residual": fp.residual,
        "provenance": _provenance(args),
    }
    d["pass"] = bool(inv.passed and (fp.radius >= 1e-8 or fp.residual < 1e-5))
    _emit(pio.dumps(d), args.out)
    return EXIT_PASS if d["pass"] else EXIT_FAIL


def cmd_verify(args) -> int:
    results = run_suite(args.suite, seed=args.seed)
    for r in results:
        status = "PASS" if r["pass"] else "FAIL"
        print(f"{status} [{r['suite']}] {r['property']} (n={r['samples']}, max {r['max_residual']:.3g})",
              file=sys.stderr)
    ok = all(r["pass"] for r in results)
    _emit(pio.dumps({"suite": args.suite, "seed": args.seed, "results": results, "pass": ok}), args.out)
    return EXIT_PASS if ok else EXIT_FAIL


COMMANDS = {
    "generate": cmd_generate,
    "map": cmd_map,
    "energy": cmd_energy,
    "soul": cmd_soul,
    "triangulate": cmd_triangulate,
    "collapse": cmd_collapse,
    "glick": cmd_glick,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int, default=None, help="diagonal parameter")
    common.add_argument("--n", type=int, default=None, help="number of vertices")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None, help="pass/fail tolerance")
    common.add_argument("--in", dest="inp", default=None, help="input polygon JSON")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--svg", default=None, help="also write an SVG picture here")

    p = argparse.ArgumentParser(prog="pentabird", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"pentabird {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write a polygon JSON file")
    g.add_argument("type", choices=["regular", "convex", "bird-perturb"])

    m = sub.add_parser("map", parents=[common], help="forward orbit as CSV or JSON")
    m.add_argument("--steps", type=int, default=None)
    m.add_argument("--format", choices=["csv", "json", "svg"], default="csv")

    for name, hlp in (("energy", "energy before and after one step"),
                      ("soul", "soul, star-shapedness and feathers")):
        sub.add_parser(name, parents=[common], help=hlp)

    t = sub.add_parser("triangulate", parents=[common], help="feather triangulation between iterates")
    t.add_argument("--layers", type=int, default=None)
    t.add_argument("--format", choices=["json", "svg"], default="json")

    c = sub.add_parser("collapse", parents=[common], help="collapse point and backward exhaustion")
    c.add_argument("--steps", type=int, default=None, help="iteration cap")

    gl = sub.add_parser("glick", parents=[common], help="invariant operator and its fixed point")
    gl.add_argument("--steps", type=int, default=None, help="iteration cap for the collapse point")

    v = sub.add_parser("verify", parents=[common], help="run the property suite")
    v.add_argument("--suite", choices=["all"] + list(SUITES), default="all")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _check_params(args)
        if args.command not in ("generate", "verify") and args.k is None:
            raise ParamError(f"{args.command} needs --k")
        return COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DegeneracyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ParamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS


if __name__ == "__main__":
    sys.exit(main())
