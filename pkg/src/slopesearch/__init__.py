"""Critical slip-circle search for simple slopes using Bishop's simplified method.

Slip circles are identified by their entry abscissa, exit abscissa and the
tangent angle at the entry point. The minimum factor of safety is located
with a coarse grid followed by a Nelder-Mead refinement (``search_hi``), with
two grid baselines (``search_fi``, ``search_fs``) for comparison.
"""

from slopesearch.slope_model import Material, SlopeCase, SoilProfile, ground_elevation, material_at
from slopesearch.slip_geometry import (
    SlipCircle,
    SlipParams,
    Viability,
    ViabilityReason,
    arc_depth,
    check_viability,
    chord_angle,
    circle_from_params,
    delta_min,
)
from slopesearch.slicing import Slice, SliceSet, build_slices
from slopesearch.bishop import (
    EvalCounter,
    SafetyEvaluation,
    SolverOptions,
    Status,
    bishop_rhs,
    evaluate_params,
    solve_F,
)
from slopesearch.search import (
    GridSpec,
    SearchOutcome,
    SimplexOptions,
    search_fi,
    search_fs,
    search_hi,
)

__version__ = "0.1.0"

__all__ = [
    "EvalCounter",
    "GridSpec",
    "Material",
    "SafetyEvaluation",
    "SearchOutcome",
    "SimplexOptions",
    "Slice",
    "SliceSet",
    "SlipCircle",
    "SlipParams",
    "SlopeCase",
    "SoilProfile",
    "SolverOptions",
    "Status",
    "Viability",
    "ViabilityReason",
    "arc_depth",
    "bishop_rhs",
    "build_slices",
    "check_viability",
    "chord_angle",
    "circle_from_params",
    "delta_min",
    "evaluate_params",
    "ground_elevation",
    "material_at",
    "search_fi",
    "search_fs",
    "search_hi",
    "solve_F",
]
