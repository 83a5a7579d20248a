"""Fidelity and derived quantities for multimode bosonic Gaussian states.

Everything works directly on first and second statistical moments: the
Uhlmann fidelity between arbitrary (mixed or pure, displaced) Gaussian
states, symplectic invariants, the Bures distance and metric, quantum Fisher
information and fidelity-based discrimination bounds — backed by an
independent truncated Fock-space oracle for validation.
"""

__version__ = "0.1.0"

from .errors import (
    GaussfidError,
    InvalidParameter,
    InvalidState,
    NumericalError,
    PureStateError,
    StateFileError,
    TruncationError,
)
from .core import (
    GaussianState,
    GibbsRepresentation,
    ModeOrdering,
    PhysicalityReport,
    WilliamsonDecomposition,
    ComplexGaussianOperator,
    cov_from_gibbs,
    cov_from_w,
    gibbs_from_cov,
    make_symplectic_form,
    partition_function,
    product_w,
    purity,
    reorder_state,
    square_root_cov,
    symplectic_action_odd,
    symplectic_eigenvalues,
    validate_state,
    w_matrix,
    williamson,
)
from .states import (
    apply_symplectic,
    coherent,
    displace,
    random_state,
    random_symplectic,
    squeezed,
    tensor,
    thermal,
    two_mode_squeezed,
    vacuum,
)
from .fidelity import (
    AuxMatrix,
    AuxSpectrum,
    FidelityReport,
    InvariantSet,
    alt_ftot_v12,
    aux_matrix,
    aux_spectrum,
    closed_form_fidelity,
    fidelity,
    invariant_set,
    singular_reduction,
)
from .metrology import (
    ErrorBounds,
    MetricEvaluation,
    QfiMatrix,
    bures_distance,
    bures_metric,
    bures_metric_delta,
    error_bounds,
    get_family,
    qfi_matrix,
    qfi_scalar,
)
from .fock import (
    CircuitSpec,
    FockDensityMatrix,
    build_circuit_state,
    moments_from_fock,
    random_circuit,
    uhlmann_fidelity_matrix,
)

__all__ = [
    "GaussfidError", "InvalidParameter", "InvalidState", "NumericalError",
    "PureStateError", "StateFileError", "TruncationError",
    "GaussianState", "GibbsRepresentation", "ModeOrdering", "PhysicalityReport",
    "WilliamsonDecomposition", "ComplexGaussianOperator",
    "cov_from_gibbs", "cov_from_w", "gibbs_from_cov", "make_symplectic_form",
    "partition_function", "product_w", "purity", "reorder_state",
    "square_root_cov", "symplectic_action_odd", "symplectic_eigenvalues",
    "validate_state", "w_matrix", "williamson",
    "apply_symplectic", "coherent", "displace", "random_state",
    "random_symplectic", "squeezed", "tensor", "thermal", "two_mode_squeezed",
    "vacuum",
    "AuxMatrix", "AuxSpectrum", "FidelityReport", "InvariantSet",
    "alt_ftot_v12", "aux_matrix", "aux_spectrum", "closed_form_fidelity",
    "fidelity", "invariant_set", "singular_reduction",
    "ErrorBounds", "MetricEvaluation", "QfiMatrix", "bures_distance",
    "bures_metric", "bures_metric_delta", "error_bounds", "get_family",
    "qfi_matrix", "qfi_scalar",
    "CircuitSpec", "FockDensityMatrix", "build_circuit_state",
    "moments_from_fock", "random_circuit", "uhlmann_fidelity_matrix",
]
