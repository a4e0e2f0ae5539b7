"""Bloch-vector paths of a driven two-level system beyond the rotating wave approximation."""

from .core import (
    BlochVector,
    NormalizationError,
    QubitAmplitudes,
    SimConfig,
    Trajectory,
    bloch_from_amplitudes,
    initial_qubit_state,
)
from .classical import ClassicalPropagatorSpec, IntegrationError, integrate_classical, rwa_state, rwa_trajectory
from .rotation import cusp_times, rotation_axis, rotation_speed, verify_decomposition
from .geometry import arc_length, classical_curvature, curvature_from_derivatives
from .quantum import QuantumConfig, QuantumModel, jaynes_cummings_trajectory, quantum_trajectory
from .metrics import DeltaScanResult, delta_scan, rms_gate_error

__version__ = "0.1.0"
