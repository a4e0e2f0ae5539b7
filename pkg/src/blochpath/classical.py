"""Classical-field two-level dynamics in the interaction picture."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.integrate import solve_ivp

from .core import (
    QubitAmplitudes,
    SimConfig,
    Trajectory,
    bloch_components,
    config_snapshot,
    initial_qubit_state,
)


class IntegrationError(RuntimeError):
    """Propagation stopped early; ``t_reached`` is the last time integrated."""

    def __init__(self, message: str, t_reached: float):
        super().__init__(f"{message} (reached t = {t_reached!r})")
        self.t_reached = t_reached


@dataclass(frozen=True)
class ClassicalPropagatorSpec:
    method: Literal["adaptive", "rk4"] = "adaptive"
    rtol: float = 1e-10
    atol: float = 1e-12
    steps_per_period: int = 1024  # used by the fixed-step method only
    max_step: float = np.inf

    def __post_init__(self):
        if self.method not in ("adaptive", "rk4"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.steps_per_period < 16:
            raise ValueError("fixed step must resolve the drive: steps_per_period >= 16")


def _rhs_array(t: float, y: np.ndarray, omega: float, detuning: float) -> np.ndarray:
    omega_a = omega - detuning
    # i dC0/dt = [e^{i(w-wa)t} + e^{-i(w+wa)t}] C1 ; C1 gets the conjugate factor
    f = np.exp(1j * detuning * t) + np.exp(-1j * (omega + omega_a) * t)
    return np.array([-1j * f * y[1], -1j * np.conj(f) * y[0]])


def rhs_classical(t: float, s: QubitAmplitudes, omega: float, detuning: float = 0.0) -> QubitAmplitudes:
    d = _rhs_array(t, s.as_array(), omega, detuning)
    return QubitAmplitudes(complex(d[0]), complex(d[1]))


def bloch_velocity_from_state(t: float, y: np.ndarray, omega: float, detuning: float = 0.0) -> np.ndarray:
    """dR/dt computed from the equations of motion, without the rotation picture."""
    dy = _rhs_array(t, y, omega, detuning)
    dcoh = np.conj(dy[0]) * y[1] + np.conj(y[0]) * dy[1]
    dz = 4 * (np.conj(y[0]) * dy[0]).real
    return np.array([2 * dcoh.real, 2 * dcoh.imag, dz])


def rk4_fixed(omega: float, detuning: float, y0: np.ndarray, times: np.ndarray, substeps: int) -> np.ndarray:
    """Classic RK4 with ``substeps`` equal steps between consecutive output times."""
    out = np.empty((len(times), 2), dtype=complex)
    y = np.asarray(y0, dtype=complex).copy()
    out[0] = y
    for i in range(1, len(times)):
        t = times[i - 1]
        h = (times[i] - t) / substeps
        for _ in range(substeps):
            k1 = _rhs_array(t, y, omega, detuning)
            k2 = _rhs_array(t + h / 2, y + h / 2 * k1, omega, detuning)
            k3 = _rhs_array(t + h / 2, y + h / 2 * k2, omega, detuning)
            k4 = _rhs_array(t + h, y + h * k3, omega, detuning)
            y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            t += h
        out[i] = y
    return out


def integrate_classical(cfg: SimConfig, spec: ClassicalPropagatorSpec | None = None) -> Trajectory:
    """Integrate the driven two-level equations from ``initial_qubit_state(cfg.theta0)``.

    Output is sampled on ``cfg.output_times()``. The adaptive method uses the
    Dormand-Prince 5(4) pair with dense output; the fixed-step method runs RK4
    with at least ``spec.steps_per_period`` steps per drive period.
    """
    spec = spec or ClassicalPropagatorSpec()
    times = cfg.output_times()
    y0 = initial_qubit_state(cfg.theta0).as_array()

    if spec.method == "rk4":
        h_out = times[1] - times[0]
        substeps = max(1, math.ceil(h_out / (cfg.drive_period / spec.steps_per_period) - 1e-9))
        states = rk4_fixed(cfg.omega, cfg.detuning, y0, times, substeps)
    else:
        sol = solve_ivp(
            _rhs_array,
            (0.0, times[-1]),
            y0,
            method="RK45",
            t_eval=times,
            args=(cfg.omega, cfg.detuning),
            rtol=spec.rtol,
            atol=spec.atol,
            max_step=spec.max_step,
        )
        if sol.status != 0:
            t_reached = float(sol.t[-1]) if len(sol.t) else 0.0
            raise IntegrationError(sol.message, t_reached)
        states = sol.y.T

    meta = config_snapshot(cfg) | {"method": spec.method}
    return Trajectory(times, bloch_components(states), states, meta)


def rwa_amplitudes(t, s0: QubitAmplitudes) -> np.ndarray:
    """Closed-form resonant RWA solution, vectorized over ``t``; shape (..., 2)."""
    t = np.asarray(t, dtype=float)
    c, s = np.cos(t), np.sin(t)
    return np.stack([s0.c0 * c - 1j * s0.c1 * s, s0.c1 * c - 1j * s0.c0 * s], axis=-1)


def rwa_state(t: float, s0: QubitAmplitudes) -> QubitAmplitudes:
    a = rwa_amplitudes(t, s0)
    return QubitAmplitudes(complex(a[0]), complex(a[1]))


def rwa_trajectory(times, theta0: float = 0.0, meta: dict | None = None) -> Trajectory:
    times = np.asarray(times, dtype=float)
    states = rwa_amplitudes(times, initial_qubit_state(theta0))
    return Trajectory(times, bloch_components(states), states, dict(meta or {}, model="rwa"))
