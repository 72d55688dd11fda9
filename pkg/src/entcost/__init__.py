"""Entanglement-cost calculators for small quantum channels and states."""

from .linalg import (
    DensityMatrix,
    PureState,
    ValidationError,
    fidelity,
    haar_isometry,
    herm_eig,
    partial_trace,
    purified_distance,
    random_density_matrix,
    random_pure_state,
    schmidt,
    tensor,
    trace_distance,
    trace_norm,
)
from .channels import (
    ChoiState,
    KrausChannel,
    SchemaError,
    amplitude_damping,
    apply,
    channel_distance_heuristic,
    channel_from_json,
    choi,
    dephasing,
    depolarizing,
    identity,
    is_entanglement_breaking_qubit,
    kraus_from_choi,
    random_channel,
)
from .entropy import (
    AepCheck,
    ClassicalJoint,
    CQState,
    aep_check,
    binary_h,
    classical_h0_cond,
    classical_joint_from_csv,
    classical_smooth_h0_cond,
    cond_von_neumann,
    h0,
    h0_cond_cq,
    smooth_h0_cond_cq,
    von_neumann,
)
from .entanglement import (
    Decomposition,
    EofResult,
    OneShotCostBounds,
    concurrence_2q,
    eof_2q,
    eof_cq_conditional,
    eof_numeric,
    eof_pure,
    max_entangled,
    one_shot_cost_bounds,
)
from .cost import (
    ConverseParams,
    CurveSample,
    Ec1Estimate,
    UNBOUNDED,
    definetti_count,
    definetti_count_log2,
    dephasing_curves,
    ec1_general,
    ec1_qubit,
    epsnet_size,
    epsnet_size_linear,
    identity_error_bound,
    postselection_factor,
    postselection_factor_log2,
    security_region,
    security_threshold,
    simulation_error,
    strong_converse_error_bound,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
