"""Subspace-sparse recovery: certificates, solvers, random-model bounds and classification."""
from .classifier import (
    UnionModel,
    check_classification_condition,
    classification_probability_bound,
    classify,
    run_classification_experiment,
    sample_union_model,
)
from .conditions import (
    ConditionReport,
    analyze_conditions,
    certify,
    coherence_recovery_check,
    dual_points_independent,
    equivalent_condition_sample,
    mutual_coherence,
)
from .errors import DomainError, ResourceError, SolverError, SubsparseError
from .geometry import (
    Dictionary,
    DualPointSet,
    covering_radius,
    dual_points,
    load_dictionary,
    minkowski_gauge,
    set_distance,
    spherical_distance,
    subspace_basis,
)
from .randomized import (
    RandomModelParams,
    drc_probability_bound,
    monte_carlo_drc,
    sample_instance,
)
from .solvers import RecoveryResult, bp_dual, bp_primal, is_subspace_sparse, l0_oracle, omp

__version__ = "0.1.0"
