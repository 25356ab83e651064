"""Continuous-time quantum search with weighted partial-information sets.

Simulation and analysis toolkit for searching an unsorted item space when
the searcher holds weighted hints (information sets) about where the targets
sit.  The package prepares weighted initial states, evolves them exactly on
the two-dimensional invariant subspace (with a brute-force N-dimensional
cross-check), estimates the state-target overlap by phase-register sampling,
counts targets, and analyzes when partial information helps or hurts.
"""

from .analysis import (
    BoundKind,
    BoundReport,
    ComparisonReport,
    MisplacedCurvePoint,
    MisplacedStructure,
    ScenarioMode,
    basic_confidence_bound,
    check_scenario_bounds,
    compare_structured_unstructured,
    disjoint_bound,
    misplaced_confidence_curve,
    misplaced_scenario,
    misplaced_structure,
    nu_squared_lower,
    random_scenario_suite,
    weight_power_sum,
)
from .dynamics import (
    ReducedState,
    SuccessDistribution,
    Trajectory,
    eigensystem,
    evolution_matrix,
    evolve_state,
    optimal_time,
    reduced_hamiltonian,
    sample_measurement,
    success_distribution,
    trajectory,
)
from .fullsim import (
    DEFAULT_DIM_CAP,
    evolve_on_grid,
    full_evolve,
    full_hamiltonian,
    invariant_subspace_residual,
    project_reduced,
    reduced_basis,
)
from .phase_estimation import (
    EIGHT_OVER_PI_SQ,
    AncillaState,
    CountResult,
    PhaseEstimate,
    RegisterDistribution,
    TailBound,
    TailBoundReport,
    apply_inverse_qft,
    branch_distribution,
    build_psi1,
    circle_distance,
    concentration_probability,
    counting_scenario,
    disambiguate,
    disjointify,
    estimate_count,
    estimate_y,
    forward_qft,
    inverse_qft,
    measurement_distribution,
    next_power_of_two,
    qft_gate_count,
    register_probabilities,
    run_counting,
    run_phase_estimation,
    sample_phase_register,
    tail_bound_report,
    walk_operator,
)
from .rng import RNG_ALGORITHM, derive_key, make_rng
from .scenario import (
    Confidence,
    ConfidenceReport,
    InformationSet,
    ScenarioError,
    SearchScenario,
    classify_confidence,
    covers,
    load_scenario,
    oracle_eval,
    scenario_from_dict,
    scenario_to_dict,
    sets_pairwise_disjoint,
    validate_coverage,
)
from .stateprep import StatePrep, uniform_superposition, weighted_superposition

__version__ = "0.1.0"
