"""Multipass quantum process tomography.

Simulates standard process tomography of a gate applied N times under
SPAM, readout, and shot noise, then recovers the single-pass error matrix
by iterative and Sylvester-equation methods, with diamond-norm and
fidelity metrics and a batch experiment runner.
"""
from .channels import (
    ChoiMatrix,
    CPTPReport,
    ErrorMatrix,
    LiouvilleSuperoperator,
    PauliTransferMatrix,
    apply_channel,
    channel_power,
    choi_from_ptm,
    is_cptp,
    liouville_from_ptm,
    ptm_from_choi,
    ptm_from_liouville,
    target_order,
    target_ptm,
    valid_pass_count,
)
from .exceptions import ConfigError, ConvergenceError, IncompleteCircuitSetError, MqptError
from .metrics import (
    MetricReport,
    diamond_bound_check,
    diamond_norm,
    differential_diamond,
    metric_report,
    process_fidelity,
    unitary_diamond_oracle,
)
from .noise import (
    FixtureSet,
    NoiseModel,
    lindblad_error_with_infidelity,
    load_fixtures,
    random_lindblad_error,
    readout_confusion,
    spam_error_channel,
)
from .pauli import (
    BasisChangeUnitary,
    Convention,
    DensityVector,
    PauliBasis,
    basis_change_unitary,
    devectorize,
    pauli_basis,
    vectorize,
)
from .recovery import (
    ExtendedSylvesterConfig,
    IterativeConfig,
    RecoveryResult,
    extended_sylvester_recover,
    involutary_multipass_expansion,
    iterative_recover,
    second_order_terms,
    sylvester_recover_involutary,
)
from .tomography import (
    ReconstructionResult,
    TomographyCircuit,
    exact_probabilities,
    generate_circuits,
    mitigate_readout,
    reconstruct,
    run_tomography,
    sample_counts,
)
from .experiments import (
    BetaFit,
    ExperimentConfig,
    TomographyRecord,
    emit,
    fit_beta,
    load_records,
    multipass_populations,
    run_batch,
)
from .metrics import diamond_norm_from_choi
from .serialize import load_channel, save_channel

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
