"""Diagonal maps on planar polygons: orbits, energies, souls and triangulations."""

__version__ = "0.1.0"

from .errors import DegeneracyError, ParamError, ParseError, PentabirdError
from .projective import DEFAULT_TOL, ProjMap, Tolerance, cross_ratio, join, meet
from .polygon import (
    LabeledPolygon,
    bird_certificate,
    bird_perturb,
    is_k_nice,
    random_convex_ngon,
    regular_ngon,
    star_relabel,
)
from .dynamics import (
    collapse_estimate,
    backward_exhaustion_probe,
    d_map,
    delta_k,
    delta_k_factored,
    delta_k_inverse,
    iterate,
)
from .energy import chi_k, mu_k, solve_coefficients
from .bird import feather_report, feathers, soul
from .triangulation import build_triangulation, spiral_paths
from .glick import glick_operator, glick_invariance_check, collapse_fixed_point_check

__all__ = [
    "__version__",
    "PentabirdError", "ParamError", "ParseError", "DegeneracyError",
    "Tolerance", "DEFAULT_TOL", "ProjMap", "join", "meet", "cross_ratio",
    "LabeledPolygon", "regular_ngon", "random_convex_ngon", "bird_perturb", "bird_certificate",
    "is_k_nice", "star_relabel",
    "d_map", "delta_k", "delta_k_factored", "delta_k_inverse", "iterate", "collapse_estimate",
    "backward_exhaustion_probe",
    "chi_k", "mu_k", "solve_coefficients",
    "soul", "feathers", "feather_report",
    "build_triangulation", "spiral_paths",
    "glick_operator", "glick_invariance_check", "collapse_fixed_point_check",
]
