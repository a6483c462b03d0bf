"""Generalized concurrence and assisted entanglement for qudit states.

Public surface: state types and ensemble machinery (`states`), the pure
and mixed state measures (`gconc`), symmetric determinant tensors and
their diagonal forms (`tau`), closed forms, bounds and the decomposition
searches (`assist`), dense linear-algebra primitives (`numkit`), the JSON
state-file format (`statefile`) and the command line (`cli`).
"""

from ._backend import BACKEND
from .assist import (
    BoundsReport,
    OptimizerOutcome,
    diagonal_form_of,
    gc_bounds,
    gcoa_from_diag,
    gcoa_pure_tripartite,
    locc_assist_check,
    monogamy_sample,
    monogamy_terms,
    optimize_avg_g,
    swap_bound,
)
from .errors import (
    CapacityError,
    DimensionError,
    GcqError,
    InternalConsistencyError,
    StateFileError,
    ValidationError,
)
from .gconc import apply_local_filter, ensemble_avg_g, g_pure, wootters_concurrence
from .numkit import determinant, haar_unitary, hermitian_eig, takagi
from .states import (
    DensityMatrix,
    Ensemble,
    Povm,
    PureBipartite,
    PureTripartite,
    apply_povm,
    eigen_ensemble,
    partial_trace,
    povm_from_unitary,
    random_density_matrix,
    random_pure_bipartite,
    random_pure_tripartite,
    random_staircase_state,
    schmidt,
    transform_ensemble,
)
from .tau import (
    DiagonalForm,
    TauTensor,
    build_tau,
    cancellation_decomposition,
    contract_tau,
    diagonalize,
    flat_unitary,
    zero_sum_phases,
)
from .unitary_opt import OptimizerConfig

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundsReport",
    "CapacityError",
    "DensityMatrix",
    "DiagonalForm",
    "DimensionError",
    "Ensemble",
    "GcqError",
    "InternalConsistencyError",
    "OptimizerConfig",
    "OptimizerOutcome",
    "Povm",
    "PureBipartite",
    "PureTripartite",
    "StateFileError",
    "TauTensor",
    "ValidationError",
    "apply_local_filter",
    "apply_povm",
    "build_tau",
    "cancellation_decomposition",
    "contract_tau",
    "determinant",
    "diagonal_form_of",
    "diagonalize",
    "eigen_ensemble",
    "ensemble_avg_g",
    "flat_unitary",
    "g_pure",
    "gc_bounds",
    "gcoa_from_diag",
    "gcoa_pure_tripartite",
    "haar_unitary",
    "hermitian_eig",
    "locc_assist_check",
    "monogamy_sample",
    "monogamy_terms",
    "optimize_avg_g",
    "partial_trace",
    "povm_from_unitary",
    "random_density_matrix",
    "random_pure_bipartite",
    "random_pure_tripartite",
    "random_staircase_state",
    "schmidt",
    "swap_bound",
    "takagi",
    "transform_ensemble",
    "wootters_concurrence",
    "zero_sum_phases",
    "__version__",
]
