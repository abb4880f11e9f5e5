"""Cat-state preparation simulator for a charge qubit coupled to a cavity mode.

The package validates, step by step, the reduction of a flux-coupled charge
qubit to a Jaynes-Cummings-like model whose evolution displaces the field
quadratically in time, and the measurement protocol that collapses the field
onto coherent-state superpositions (cat states).
"""

from .config import ConfigError, RunConfig, build_run_config, parse_config_file
from .diagnostics import (
    WignerGrid,
    expectation_a,
    fidelity,
    loglog_slope,
    propagator_discrepancy,
    truncation_leakage,
    wigner,
)
from .dynamics import (
    CatPair,
    PropagatorKind,
    ideal_cat,
    initial_state,
    make_cat,
    project_qubit,
    propagator,
    propagator_analytic,
    propagator_exact,
    propagator_factored,
    qubit_rotation_matrix,
    rotate_qubit,
)
from .fock import (
    Operator,
    StateVector,
    TruncationConfig,
    TruncationWarning,
    coherent_state,
    displacement,
    fock_state,
    identity,
    make_annihilation,
    make_creation,
    matrix_exponential,
    number_operator,
    operator_cosine,
    operator_sine,
    sigma_minus,
    sigma_plus,
    sigma_x,
    sigma_z,
    tensor,
    vacuum_state,
)
from .model import (
    DerivedParams,
    DeviceParams,
    RegimeReport,
    RegimeWarning,
    beta_from_alpha,
    build_full_hamiltonian,
    build_jc_hamiltonian,
    build_polaron_transform,
    build_polaron_transform_pauli,
    build_transformed_hamiltonian,
    derive_params,
    regime_check,
)

__version__ = "0.1.0"

__all__ = [
    "CatPair",
    "ConfigError",
    "DerivedParams",
    "DeviceParams",
    "Operator",
    "PropagatorKind",
    "RegimeReport",
    "RegimeWarning",
    "RunConfig",
    "StateVector",
    "TruncationConfig",
    "TruncationWarning",
    "WignerGrid",
    "beta_from_alpha",
    "build_full_hamiltonian",
    "build_jc_hamiltonian",
    "build_polaron_transform",
    "build_polaron_transform_pauli",
    "build_run_config",
    "build_transformed_hamiltonian",
    "coherent_state",
    "derive_params",
    "displacement",
    "expectation_a",
    "fidelity",
    "fock_state",
    "ideal_cat",
    "identity",
    "initial_state",
    "loglog_slope",
    "make_annihilation",
    "make_cat",
    "make_creation",
    "matrix_exponential",
    "number_operator",
    "operator_cosine",
    "operator_sine",
    "parse_config_file",
    "project_qubit",
    "propagator",
    "propagator_analytic",
    "propagator_discrepancy",
    "propagator_exact",
    "propagator_factored",
    "qubit_rotation_matrix",
    "regime_check",
    "rotate_qubit",
    "sigma_minus",
    "sigma_plus",
    "sigma_x",
    "sigma_z",
    "tensor",
    "truncation_leakage",
    "vacuum_state",
    "wigner",
]
