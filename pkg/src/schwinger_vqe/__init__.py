"""Simulation toolkit for VQE studies of the multi-flavor Schwinger model."""

from .ansatz import AnsatzParams, Circuit, decompose_to_native, prepare_trial_state
from .model import ModelParams, build_hamiltonian, from_couplings, particle_number
from .pauli import PauliString, PauliSum, qubitwise_commuting_groups
from .phase import critical_point, exact_ground_state, neutral_ground_state, scan
from .simulator import Counts, DensityMatrix, NoiseModel, StateVector, expectation
from .tomography import fidelity, qmi, reconstruct, tomography_measure
from .vqe import Backend, SpsaConfig, VqeResult, estimate_energy, spsa_run

__all__ = [
    "AnsatzParams",
    "Backend",
    "Circuit",
    "Counts",
    "DensityMatrix",
    "ModelParams",
    "NoiseModel",
    "PauliString",
    "PauliSum",
    "SpsaConfig",
    "StateVector",
    "VqeResult",
    "build_hamiltonian",
    "critical_point",
    "decompose_to_native",
    "estimate_energy",
    "exact_ground_state",
    "expectation",
    "fidelity",
    "from_couplings",
    "neutral_ground_state",
    "particle_number",
    "prepare_trial_state",
    "qmi",
    "qubitwise_commuting_groups",
    "reconstruct",
    "scan",
    "spsa_run",
    "tomography_measure",
]

__version__ = "0.1.0"
