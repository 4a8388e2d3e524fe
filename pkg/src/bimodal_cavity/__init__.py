"""Adiabatic and measurement-based entanglement preparation with Lambda atoms
in a two-mode cavity."""

from .dark_state import (
    dark_state_closed_form_2atom,
    dark_states_numeric,
    freeze_state,
    symmetric_coefficients,
    zero_energy_states,
)
from .dynamics import StateVector, TimeGrid, populations, propagate
from .fock_basis import AtomLevel, BasisState, Sector, build_sector, conserved_charges
from .measurement import (
    AtomLevelProjector,
    AtomSuperposition,
    FieldNumber,
    UniformAtoms,
    outcome_distribution,
    project,
    project_ghz,
    project_qutrit,
)
from .metrics import TargetState, concurrence, fidelity, partial_trace
from .model import ModelConfig, PulseSchedule, coupling_at, hamiltonian_at
from .scenarios import ScenarioConfig, run_scenario, sweep

__all__ = [
    "AtomLevel", "AtomLevelProjector", "AtomSuperposition", "BasisState", "FieldNumber",
    "ModelConfig", "PulseSchedule", "ScenarioConfig", "Sector", "StateVector", "TargetState",
    "TimeGrid", "UniformAtoms", "build_sector", "concurrence", "conserved_charges",
    "coupling_at", "dark_state_closed_form_2atom", "dark_states_numeric", "fidelity",
    "freeze_state", "hamiltonian_at", "outcome_distribution", "partial_trace", "populations",
    "project", "project_ghz", "project_qutrit", "propagate", "run_scenario", "sweep",
    "symmetric_coefficients", "zero_energy_states",
]
