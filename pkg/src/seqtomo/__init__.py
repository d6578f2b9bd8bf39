"""seqtomo: a simulation workbench for selective quantum state and process
tomography, with every sampled estimator paired to an exact-expectation
oracle computed by dense simulation."""

__version__ = "0.1.0"

from .core import (
    ATOL,
    DensityMatrix,
    Operator,
    PureState,
    apply_unitary,
    dagger,
    haar_random_state,
    haar_random_unitary,
    maximally_entangled_state,
    partial_trace,
    random_density_matrix,
    tensor,
)
from .pauli import PauliLabel, PhasedPauli, pauli_basis, pauli_matrix, pauli_product, pauli_trace_inner
from .channels import (
    ChiMatrix,
    KrausChannel,
    ValidityReport,
    apply_chi,
    apply_kraus,
    channel_from_json,
    channel_to_json,
    channel_zoo,
    chi_csv_rows,
    chi_to_kraus,
    choi_state,
    compose_channels,
    kraus_to_chi,
    random_channel,
    tensor_channels,
    validate_channel,
    zoo_catalog,
    zoo_descriptions,
)
from .seqst import (
    EstimateReport,
    PreparationBasis,
    SeqstOutcome,
    seqst_exact,
    seqst_joint_state,
    seqst_outcome_distribution,
    seqst_sample,
    standard_pauli_qst,
)
from .qpt import (
    ChiEstimate,
    GateCounts,
    aapt_full_chi,
    choi_basis,
    choi_basis_state,
    dcqd_diagonal,
    dcqd_diagonal_sample,
    entangled_state_circuit,
    seqpt_estimate,
    seqpt_exact_average,
    seqpt_outcome_distribution,
    seqpt_single_state,
    seqst_qpt_exact,
    seqst_qpt_sample,
)
from .estimation import (
    RandomStream,
    ShotPlan,
    chernoff_plan,
    sample_categorical,
    sample_categorical_partitioned,
)
from . import errors

__all__ = [
    "ATOL",
    "ChiEstimate",
    "ChiMatrix",
    "DensityMatrix",
    "EstimateReport",
    "GateCounts",
    "KrausChannel",
    "Operator",
    "PauliLabel",
    "PhasedPauli",
    "PreparationBasis",
    "PureState",
    "RandomStream",
    "SeqstOutcome",
    "ShotPlan",
    "ValidityReport",
    "aapt_full_chi",
    "apply_chi",
    "apply_kraus",
    "apply_unitary",
    "channel_from_json",
    "channel_to_json",
    "channel_zoo",
    "chernoff_plan",
    "chi_csv_rows",
    "chi_to_kraus",
    "choi_basis",
    "choi_basis_state",
    "choi_state",
    "compose_channels",
    "dagger",
    "dcqd_diagonal",
    "dcqd_diagonal_sample",
    "entangled_state_circuit",
    "errors",
    "haar_random_state",
    "haar_random_unitary",
    "kraus_to_chi",
    "maximally_entangled_state",
    "partial_trace",
    "pauli_basis",
    "pauli_matrix",
    "pauli_product",
    "pauli_trace_inner",
    "random_channel",
    "random_density_matrix",
    "sample_categorical",
    "sample_categorical_partitioned",
    "seqpt_estimate",
    "seqpt_exact_average",
    "seqpt_outcome_distribution",
    "seqpt_single_state",
    "seqst_exact",
    "seqst_joint_state",
    "seqst_outcome_distribution",
    "seqst_qpt_exact",
    "seqst_qpt_sample",
    "seqst_sample",
    "standard_pauli_qst",
    "tensor",
    "tensor_channels",
    "validate_channel",
    "zoo_catalog",
    "zoo_descriptions",
]
