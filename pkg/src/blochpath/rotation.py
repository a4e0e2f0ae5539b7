"""Instantaneous rotation axis and speed of the resonant classical-field Bloch flow.

Over an infinitesimal step the state is rotated by U = I - i (dtheta/2) n.sigma,
which moves the Bloch vector as dR/dt = w x R with the generator

    w(t) = theta_dot * n = (2 [1 + cos 2wt], 2 sin 2wt, 0).

Its length 4|cos wt| vanishes at the cusp times (2k+1) pi / (2 omega), where the
axis flips from +Y to -Y.
"""

from __future__ import annotations

import math
from typing import Literal

import numpy as np
from scipy.spatial.transform import Rotation

from .core import Trajectory

CUSP_EPS = 1e-14


def rotation_speed(t, omega: float):
    return 4 * np.abs(np.cos(omega * np.asarray(t)))


def rotation_generator(t, omega: float) -> np.ndarray:
    """theta_dot * n; smooth through cusps, zero exactly at them. Shape (..., 3)."""
    phase = 2 * omega * np.asarray(t, dtype=float)
    return np.stack([2 * (1 + np.cos(phase)), 2 * np.sin(phase), np.zeros_like(phase)], axis=-1)


def generator_rate(t, omega: float) -> np.ndarray:
    """Time derivative of :func:`rotation_generator`."""
    phase = 2 * omega * np.asarray(t, dtype=float)
    return np.stack([-4 * omega * np.sin(phase), 4 * omega * np.cos(phase), np.zeros_like(phase)], axis=-1)


def rotation_axis(t: float, omega: float) -> np.ndarray | None:
    """Unit rotation axis, or None at a cusp where it is undefined."""
    c = math.cos(omega * t)
    if abs(c) < CUSP_EPS:
        return None
    return np.array([abs(c), math.sin(omega * t) * math.copysign(1.0, c), 0.0])


def cusp_times(omega: float, t_end: float) -> np.ndarray:
    if omega <= 0:
        raise ValueError("omega must be positive")
    k_max = math.floor((2 * omega * t_end / math.pi - 1) / 2 + 1e-12)
    if k_max < 0:
        return np.empty(0)
    k = np.arange(k_max + 1)
    return (2 * k + 1) * math.pi / (2 * omega)


def speed_maximum_times(omega: float, t_end: float) -> np.ndarray:
    """Times k pi / omega where the rotation speed peaks at twice the RWA value."""
    k_max = math.floor(omega * t_end / math.pi + 1e-12)
    return np.arange(k_max + 1) * math.pi / omega


def verify_decomposition(
    traj: Trajectory,
    omega: float,
    rule: Literal["left", "midpoint"] = "left",
    generator=None,
) -> float:
    """Largest one-step deviation between the sampled flow and the rotation picture.

    Each sample R(t) is rotated exactly (Rodrigues) by the generator frozen at
    ``t`` (``rule="left"``, residual O(dt^2)) or at the interval midpoint, over
    the gap to the next sample, and compared with R(t + dt).

    ``generator(t)`` overrides the classical generator, e.g. with a constant
    (2, 0, 0) to check an RWA trajectory.
    """
    if traj.meta.get("detuning", 0.0):
        raise NotImplementedError("rotation decomposition is only derived at resonance")
    t = traj.times
    dt = np.diff(t)
    t_eval = t[:-1] if rule == "left" else t[:-1] + dt / 2
    w = generator(t_eval) if generator is not None else rotation_generator(t_eval, omega)
    w = np.broadcast_to(w, (len(dt), 3))
    stepped = Rotation.from_rotvec(w * dt[:, None]).apply(traj.bloch[:-1])
    return float(np.max(np.linalg.norm(stepped - traj.bloch[1:], axis=1)))
