"""spinsim: digital quantum simulation of small spin models on transmons.

Compiles Heisenberg / frustrated-Ising / transverse-field-Ising protocols
into xy-exchange + single-spin gate sequences, evolves them exactly and on
a multilevel transmon-resonator device model with Lindblad noise, and
reproduces digital-error curves, execution times and fidelity budgets.
"""

from .compiler import (
    Gate,
    GateErrorModel,
    GateSequence,
    GateTimes,
    adjoint_exchanged,
    compile_heisenberg_chain,
    compile_heisenberg_pair,
    compile_ising_frustrated,
    compile_tfim,
    execution_time,
    gate_counts,
    sequence_duration,
    sequence_fidelity_estimate,
    trotter_error_bound,
)
from .config import ConfigError, ExperimentConfig, resolve_config, validate_config
from .device import (
    DeviceCalibration,
    RK4Propagator,
    calibrate_device,
    device_channels,
    extract_qubit_block,
    run_sequence_on_device,
)
from .dynamics import (
    LindbladDiagnostics,
    NoiseParams,
    Trajectory,
    TrajectorySample,
    accumulated_gate_error,
    digital_error_curve,
    evolve_unitary,
    gate_unitary,
    lindblad_evolve,
    run_sequence_ideal,
    sequence_unitary,
)
from .hamiltonians import (
    DeviceParams,
    PauliString,
    SpinHamiltonian,
    device_hamiltonian,
    dispersive_xy_rate,
    heisenberg,
    ising,
    rotated_xy_pair,
    tfim,
    xy_pair,
)
from .operators import (
    HilbertSpace,
    QuantumState,
    dag,
    elementary,
    embed,
    expectation,
    expm_hermitian,
    kron,
    kron_all,
    partial_trace,
    state_fidelity,
)

__version__ = "0.1.0"

__all__ = [
    "Gate",
    "GateErrorModel",
    "GateSequence",
    "GateTimes",
    "adjoint_exchanged",
    "compile_heisenberg_chain",
    "compile_heisenberg_pair",
    "compile_ising_frustrated",
    "compile_tfim",
    "execution_time",
    "gate_counts",
    "sequence_duration",
    "sequence_fidelity_estimate",
    "trotter_error_bound",
    "ConfigError",
    "ExperimentConfig",
    "resolve_config",
    "validate_config",
    "DeviceCalibration",
    "RK4Propagator",
    "calibrate_device",
    "device_channels",
    "extract_qubit_block",
    "run_sequence_on_device",
    "LindbladDiagnostics",
    "NoiseParams",
    "Trajectory",
    "TrajectorySample",
    "accumulated_gate_error",
    "digital_error_curve",
    "evolve_unitary",
    "gate_unitary",
    "lindblad_evolve",
    "run_sequence_ideal",
    "sequence_unitary",
    "DeviceParams",
    "PauliString",
    "SpinHamiltonian",
    "device_hamiltonian",
    "dispersive_xy_rate",
    "heisenberg",
    "ising",
    "rotated_xy_pair",
    "tfim",
    "xy_pair",
    "HilbertSpace",
    "QuantumState",
    "dag",
    "elementary",
    "embed",
    "expectation",
    "expm_hermitian",
    "kron",
    "kron_all",
    "partial_trace",
    "state_fidelity",
    "__version__",
]
