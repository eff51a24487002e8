"""Anomalous heat transfer between few-qubit systems.

Pauli-string Hamiltonians, local-equilibrium initial states, exact unitary
dynamics, the heat-transfer entropy ledger and closed-form convexity scans.
"""

from .analysis import (
    calibrate_convention,
    convexity_closed_form,
    initial_rate_check_on_boundary,
    perturbed_convexity,
    phase_boundary,
    phase_scan,
)
from .dynamics import (
    TimeSeries,
    convexity_decomposition,
    evolve,
    heat_series,
    q_derivative,
    theorem1_witness,
)
from .ledger import HeatLedger, classify_aht, compute_ledger, mutual_information, relative_entropy, von_neumann_entropy
from .pauli import PauliSum, PauliTerm, SystemSpec, free_hamiltonian, to_matrix, verify_heat_transfer_condition
from .scenarios import Scenario, scenario
from .states import DensityMatrix, InvalidStateError, gibbs_qubit, product_state

__version__ = "0.1.0"
