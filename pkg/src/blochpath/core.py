"""Shared types and the qubit-amplitude to Bloch-vector map.

Units: every frequency is measured in units of the Rabi frequency (Omega = 1)
and every time in units of 1/Omega.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import Any

import numpy as np

NORM_TOL = 1e-6


class NormalizationError(ValueError):
    """A qubit state whose norm deviates from one."""


class CuspError(ValueError):
    """A quantity that is undefined at a cusp instant."""


@dataclass(frozen=True)
class QubitAmplitudes:
    c0: complex
    c1: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.c0, self.c1], dtype=complex)

    @property
    def norm_sq(self) -> float:
        return abs(self.c0) ** 2 + abs(self.c1) ** 2


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @classmethod
    def from_array(cls, r) -> "BlochVector":
        return cls(float(r[0]), float(r[1]), float(r[2]))

    @property
    def length(self) -> float:
        return math.sqrt(self.x**2 + self.y**2 + self.z**2)


@dataclass(frozen=True)
class SimConfig:
    """Classical-field run parameters.

    ``detuning`` is Delta = omega - omega_a, so the atomic frequency is
    derived as ``omega - detuning``.
    """

    omega: float = 5.0
    detuning: float = 0.0
    theta0: float = 0.0
    t_end: float = math.pi
    samples_per_drive_period: int = 256

    def __post_init__(self):
        errors = self.problems()
        if errors:
            raise ValueError("; ".join(errors))

    def problems(self) -> list[str]:
        return sim_problems(self.omega, self.t_end, self.samples_per_drive_period)

    @property
    def omega_a(self) -> float:
        return self.omega - self.detuning

    @property
    def drive_period(self) -> float:
        return 2 * math.pi / self.omega

    def output_times(self) -> np.ndarray:
        return uniform_times(self.omega, self.t_end, self.samples_per_drive_period)


def sim_problems(omega, t_end, spp) -> list[str]:
    errors = []
    if not omega > 0:
        errors.append("omega must be positive")
    if not t_end > 0:
        errors.append("t_end must be positive")
    if int(spp) != spp or spp < 16:
        errors.append("samples_per_drive_period must be an integer >= 16")
    return errors


def uniform_times(omega: float, t_end: float, samples_per_drive_period: int) -> np.ndarray:
    """Uniform grid on [0, t_end] with spacing at most one drive period / spp.

    The grid always ends exactly at ``t_end``.
    """
    h_max = 2 * math.pi / omega / samples_per_drive_period
    n = max(1, math.ceil(t_end / h_max - 1e-9))
    return np.linspace(0.0, t_end, n + 1)


@dataclass
class Trajectory:
    """Time-ordered samples of a Bloch path.

    ``states`` holds the amplitudes that produced ``bloch`` (shape (N, 2) for
    the classical model, (N, 2*(n_max+1)) for the quantum model) or None when
    only Bloch data is kept.
    """

    times: np.ndarray
    bloch: np.ndarray
    states: np.ndarray | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.bloch = np.asarray(self.bloch, dtype=float)
        if self.times.ndim != 1 or self.bloch.shape != (len(self.times), 3):
            raise ValueError("bloch must have shape (len(times), 3)")
        if self.states is not None and len(self.states) != len(self.times):
            raise ValueError("states and times differ in length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.times)

    @property
    def X(self):
        return self.bloch[:, 0]

    @property
    def Y(self):
        return self.bloch[:, 1]

    @property
    def Z(self):
        return self.bloch[:, 2]


def config_snapshot(cfg) -> dict[str, Any]:
    return {"type": type(cfg).__name__, **asdict(cfg)}


def bloch_components(amps: np.ndarray) -> np.ndarray:
    """Vectorized Bloch map for amplitude arrays of shape (..., 2)."""
    amps = np.asarray(amps, dtype=complex)
    c0, c1 = amps[..., 0], amps[..., 1]
    # X = 2 Re(C0* C1), Y = 2 Im(C0* C1), Z = |C0|^2 - |C1|^2 for normalized states
    coh = np.conj(c0) * c1
    return np.stack([2 * coh.real, 2 * coh.imag, 2 * np.abs(c0) ** 2 - 1], axis=-1)


def bloch_from_amplitudes(s: QubitAmplitudes | np.ndarray) -> BlochVector:
    """Map normalized qubit amplitudes (C0, C1) onto the Bloch sphere.

    Raises
    ------
    NormalizationError
        If ``|C0|^2 + |C1|^2`` differs from one by more than 1e-6.
    """
    amps = s.as_array() if isinstance(s, QubitAmplitudes) else np.asarray(s, dtype=complex)
    norm_sq = float(np.sum(np.abs(amps) ** 2))
    if abs(norm_sq - 1) > NORM_TOL:
        raise NormalizationError(f"state norm^2 = {norm_sq!r}, expected 1")
    return BlochVector.from_array(bloch_components(amps))


def initial_qubit_state(theta0: float) -> QubitAmplitudes:
    return QubitAmplitudes(complex(math.cos(theta0 / 2)), complex(math.sin(theta0 / 2)))


def amplitudes_from_bloch(r: BlochVector) -> QubitAmplitudes:
    """One preimage of a point on the unit sphere (global phase fixed so C0 is real)."""
    theta = math.atan2(math.hypot(r.x, r.y), r.z)
    phi = math.atan2(r.y, r.x)
    return QubitAmplitudes(complex(math.cos(theta / 2)), math.sin(theta / 2) * complex(math.cos(phi), math.sin(phi)))
