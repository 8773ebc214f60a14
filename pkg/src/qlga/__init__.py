"""Quantum lattice-gas automata on a statevector simulator.

Binary and superposition encoded D1Q3 models and the 2D HPP model, checked
against classical lattice-gas automata, with Pauli-trajectory noise.
"""

from .circuit import Circuit, ResourceReport, decompose, resource_report, unitary_of
from .fields import DecodeError, OccupancyField
from .gates import Gate, GateError
from .lga import LatticeState, collide, mass_profile, propagate, step
from .noise import NoiseModel, preset, run_noisy_shots
from .pipeline import (ExperimentConfig, InitialCondition, ProfileSeries, ensemble_average,
                       generate_initial, run_experiment)
from .statevec import RegisterLayout, ShotHistogram, StateVector, apply_gate, new_basis_state, sample_measurements

__version__ = "0.1.0"
