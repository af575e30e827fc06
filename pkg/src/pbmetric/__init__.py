"""Partial b-metric spaces, gated four-map contractions, and certified
common fixed points.

The package has three layers:

* declaration — an expression DSL and scenario file format for spaces,
  self-maps, admissibility pairs and contraction toolkits
  (``expressions``, ``scenarios``);
* falsification — finite-sample checkers for the space axioms, the
  auxiliary function classes and every contraction hypothesis
  (``spaces``, ``function_classes``, ``contraction``);
* construction — the interleaved preimage-driven iteration, coincidence
  search, and common-fixed-point certification (``solver``).

Checks falsify, never prove: carriers are uncountable, so a passing
report means no violation was found on the sampled points.
"""

__version__ = "0.1.0"

from .contraction import (
    GridSpec,
    Scenario,
    Toolkit,
    check_cyclic_admissible,
    check_range_inclusion,
    check_self_maps,
    check_sequential_closure,
    check_v0_gate,
    gate,
    make_cyclic_preset,
    make_weak_contraction_preset,
    n_s,
    check_tac_at,
    verify_tac_grid,
)
from .errors import PbmError
from .expressions import eval_expr, parse_expression, to_source
from .function_classes import (
    CClassFunction,
    OmegaOneFunction,
    XiFunction,
    cclass_half,
    cclass_truncated_difference,
    check_cclass,
    check_omega1,
    check_xi,
    omega_log3,
    xi_identity,
)
from .intervals import Interval, IntervalUnion, parse_interval_union
from .reports import AxiomReport, ComplianceReport, Witness
from .scenarios import (
    BUNDLED_NAMES,
    ScenarioFile,
    bundled_scenario_file,
    load_scenario,
    parse_scenario_text,
)
from .solver import (
    CoincidenceSet,
    FixedPointCertificate,
    IterationTrace,
    LimitCertificate,
    UniquenessReport,
    build_sequence,
    certify_common_fixed_point,
    check_step_monotonicity,
    check_weak_compatibility,
    detect_limit,
    find_coincidence_points,
    search_uniqueness,
)
from .rootfind import solve_preimage
from .spaces import (
    PartialBMetricSpace,
    check_b_metric_axioms,
    check_cauchy_numeric,
    check_convergence,
    check_pbm_axioms,
    pbm_equal,
    pbm_equal_defect,
    sample_carrier,
)

__all__ = [
    "__version__",
    "AxiomReport",
    "BUNDLED_NAMES",
    "CClassFunction",
    "CoincidenceSet",
    "ComplianceReport",
    "FixedPointCertificate",
    "GridSpec",
    "Interval",
    "IntervalUnion",
    "IterationTrace",
    "LimitCertificate",
    "OmegaOneFunction",
    "PartialBMetricSpace",
    "PbmError",
    "Scenario",
    "ScenarioFile",
    "Toolkit",
    "UniquenessReport",
    "Witness",
    "XiFunction",
    "build_sequence",
    "bundled_scenario_file",
    "cclass_half",
    "cclass_truncated_difference",
    "certify_common_fixed_point",
    "check_b_metric_axioms",
    "check_cauchy_numeric",
    "check_cclass",
    "check_convergence",
    "check_cyclic_admissible",
    "check_omega1",
    "check_pbm_axioms",
    "check_range_inclusion",
    "check_self_maps",
    "check_sequential_closure",
    "check_step_monotonicity",
    "check_tac_at",
    "check_v0_gate",
    "check_weak_compatibility",
    "check_xi",
    "detect_limit",
    "eval_expr",
    "find_coincidence_points",
    "gate",
    "load_scenario",
    "make_cyclic_preset",
    "make_weak_contraction_preset",
    "n_s",
    "omega_log3",
    "parse_expression",
    "parse_interval_union",
    "parse_scenario_text",
    "pbm_equal",
    "pbm_equal_defect",
    "sample_carrier",
    "search_uniqueness",
    "solve_preimage",
    "to_source",
    "verify_tac_grid",
    "xi_identity",
]
