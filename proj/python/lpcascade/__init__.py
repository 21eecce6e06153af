"""Exact l_p range search over cascaded 1-Lipschitz block projections."""

from ._lpcascade import (
    Index,
    InputError,
    InvariantError,
    adaptive_feature,
    brute_force_range,
    calibrate_epsilon,
    cascade_cost,
    check_norm_equivalence,
    covariance,
    diversion,
    dual_exponent,
    estimate_cost,
    first_principal_component,
    generate,
    load_vectors,
    lp_distance,
    lp_norm,
    orthogonal_feature,
    project_orthogonal,
    q_mapping_norm,
    run_bench,
    save_csv,
    save_fvecs,
)

__all__ = [
    "Index",
    "InputError",
    "InvariantError",
    "adaptive_feature",
    "brute_force_range",
    "calibrate_epsilon",
    "cascade_cost",
    "check_norm_equivalence",
    "covariance",
    "diversion",
    "dual_exponent",
    "estimate_cost",
    "first_principal_component",
    "generate",
    "load_vectors",
    "lp_distance",
    "lp_norm",
    "orthogonal_feature",
    "project_orthogonal",
    "q_mapping_norm",
    "run_bench",
    "save_csv",
    "save_fvecs",
]
