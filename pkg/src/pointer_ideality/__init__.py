"""Formal and operational idealness of pointer states in qubit measurements."""
from .grid import (
    Grid,
    GridError,
    GridMismatchError,
    Wavefunction,
    WindowError,
    abs_overlap,
    apply_linear_phase,
    auto_grid,
    boundary_mass,
    inner_product,
    make_grid,
    normalize,
    translate,
)
from .measurement import (
    CompositeState,
    OutcomeCounts,
    PovmPair,
    QubitState,
    channel_probabilities,
    make_composite,
    povm_elements,
    povm_probabilities,
    sample_outcomes,
)
from .measures import (
    IdealityReport,
    error_measure,
    faithfulness_certificate,
    formal_overlap,
    gaussian_closed_forms,
    ideality_report,
    lagrangian_objective,
    operational_overlap,
    squeezed_closed_forms,
    stationarity_residual,
)
from .pointers import (
    FaithfulParams,
    GaussianParams,
    SqueezedParams,
    faithful_from_seed,
    faithful_post_states,
    faithful_sequence_step,
    faithful_u,
    gaussian_initial,
    gaussian_post,
    linear_phase_pointer,
    squeezed_initial,
    squeezed_post,
)

__version__ = "0.1.0"
