"""Codes whose tolerated erasure, error and detection patterns form a hypergraph."""

from ._kernels import BACKEND
from .codes import (
    Code,
    LinearCode,
    TableCode,
    Verdict,
    code_from_json,
    detect_good,
    eps_success,
    erasure_good,
    error_good,
    error_good_direct,
    linear_erasure_good,
)
from .coloring import Coloring, color_exact_k, color_exact_strong, color_greedy_k, validate
from .constructions import (
    ColoredCode,
    EvalCode,
    LiftedCode,
    RSCode,
    build_detection_code,
    build_eps_code,
    build_erasure_code,
    build_error_code,
    build_error_code_via_era,
    build_eval_code_gqk,
    lift_code,
    rs_make,
)
from .gfq import Alphabet, Field, field_new, pp_ceil
from .hypergraph import (
    Hypergraph,
    complement_edges,
    complete_uniform,
    cycle,
    err_to_era,
    feasibility,
    generate,
    gqk,
    lift_era_to_err,
)
from .rng import make_rng
from .search import mols_clique, param_report, search_table_code

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "BACKEND",
    "Code",
    "ColoredCode",
    "Coloring",
    "EvalCode",
    "Field",
    "Hypergraph",
    "LiftedCode",
    "LinearCode",
    "RSCode",
    "TableCode",
    "Verdict",
    "build_detection_code",
    "build_eps_code",
    "build_erasure_code",
    "build_error_code",
    "build_error_code_via_era",
    "build_eval_code_gqk",
    "code_from_json",
    "color_exact_k",
    "color_exact_strong",
    "color_greedy_k",
    "complement_edges",
    "complete_uniform",
    "cycle",
    "detect_good",
    "eps_success",
    "erasure_good",
    "err_to_era",
    "error_good",
    "error_good_direct",
    "feasibility",
    "field_new",
    "generate",
    "gqk",
    "lift_code",
    "lift_era_to_err",
    "linear_erasure_good",
    "make_rng",
    "mols_clique",
    "param_report",
    "pp_ceil",
    "rs_make",
    "search_table_code",
    "validate",
]
