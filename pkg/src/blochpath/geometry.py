"""Kinematics and curvature of Bloch paths.

Closed forms for the resonant classical model follow from dR/dt = w x R with
the generator of :mod:`blochpath.rotation`; the quantum model goes through
:func:`curvature_from_derivatives` with Ehrenfest-derived v and a.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.optimize import minimize_scalar

from .core import BlochVector, Trajectory
from .rotation import generator_rate, rotation_generator

SPEED_EPS = 1e-12


@dataclass(frozen=True)
class KinematicSample:
    t: float
    r: BlochVector
    v: np.ndarray
    a: np.ndarray
    s_dot: float
    s_ddot: float
    kappa: float


class PathSpeed(NamedTuple):
    s_dot: float
    s_ddot: float
    one_sided: bool  # s_ddot is the t -> t_k+ limit at a cusp


def _vec(r) -> np.ndarray:
    return r.as_array() if isinstance(r, BlochVector) else np.asarray(r, dtype=float)


def classical_velocity(r, t, omega: float) -> np.ndarray:
    """dR/dt = w(t) x R. Broadcasts over r of shape (..., 3) and matching t."""
    return np.cross(rotation_generator(t, omega), _vec(r))


def axis_drift_acceleration(r, t, omega: float) -> np.ndarray:
    """The part of d2R/dt2 due to the turning generator alone, dw/dt x R."""
    return np.cross(generator_rate(t, omega), _vec(r))


def classical_acceleration(r, t, omega: float) -> np.ndarray:
    """Full d2R/dt2 = dw/dt x R + w x (w x R) along the classical flow."""
    r = _vec(r)
    w = rotation_generator(t, omega)
    return axis_drift_acceleration(r, t, omega) + np.cross(w, np.cross(w, r))


def _transverse(r: np.ndarray, t: float, omega: float) -> float:
    # |R x u| with u = (cos wt, sin wt, 0): sqrt(Z^2 + [X sin wt - Y cos wt]^2)
    x, y, z = r
    return math.sqrt(z * z + (x * math.sin(omega * t) - y * math.cos(omega * t)) ** 2)


def speed_and_sddot(r, t: float, omega: float) -> PathSpeed:
    """Path speed |dR/dt| and its time derivative for the classical model."""
    r = _vec(r)
    x, y, _ = r
    c = math.cos(omega * t)
    g = _transverse(r, t, omega)
    s_dot = 4 * abs(c) * g

    one_sided = abs(c) < 1e-14
    # d|cos wt|/dt; at a cusp take the right-hand limit, +omega
    d_abs_cos = omega if one_sided else -omega * math.sin(omega * t) * math.copysign(1.0, c)
    phase = 2 * omega * t
    if g > 0:
        dg = 0.5 * omega * ((x * x - y * y) * math.sin(phase) - 2 * x * y * math.cos(phase)) / g
    else:
        dg = 0.0
    s_ddot = 4 * d_abs_cos * g + 4 * abs(c) * dg
    return PathSpeed(s_dot, s_ddot, one_sided)


def curvature_from_derivatives(v, a) -> float:
    """kappa = |v x a| / |v|^3; ``math.inf`` when |v| < 1e-12."""
    v = np.asarray(v, dtype=float)
    speed = float(np.linalg.norm(v))
    if speed < SPEED_EPS:
        return math.inf
    return float(np.linalg.norm(np.cross(v, a))) / speed**3


def curvatures_from_derivatives(v: np.ndarray, a: np.ndarray) -> np.ndarray:
    speed = np.linalg.norm(v, axis=-1)
    cross = np.linalg.norm(np.cross(v, a), axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        kappa = cross / speed**3
    return np.where(speed < SPEED_EPS, np.inf, kappa)


def classical_curvature(r, t: float, omega: float) -> float:
    """kappa = |A - s_ddot t_hat| / s_dot^2 for the classical model; inf at cusps."""
    r = _vec(r)
    s_dot, s_ddot, _ = speed_and_sddot(r, t, omega)
    if s_dot < SPEED_EPS:
        return math.inf
    tangent = classical_velocity(r, t, omega) / s_dot
    a = classical_acceleration(r, t, omega)
    return float(np.linalg.norm(a - s_ddot * tangent)) / s_dot**2


def classical_kinematics(traj: Trajectory, omega: float) -> list[KinematicSample]:
    out = []
    for t, r in zip(traj.times, traj.bloch):
        sp = speed_and_sddot(r, t, omega)
        out.append(
            KinematicSample(
                t=float(t),
                r=BlochVector.from_array(r),
                v=classical_velocity(r, t, omega),
                a=classical_acceleration(r, t, omega),
                s_dot=sp.s_dot,
                s_ddot=sp.s_ddot,
                kappa=classical_curvature(r, t, omega),
            )
        )
    return out


def classical_speeds(traj: Trajectory, omega: float) -> np.ndarray:
    return np.linalg.norm(classical_velocity(traj.bloch, traj.times, omega), axis=1)


def arc_length(traj: Trajectory, speeds: np.ndarray | None = None, omega: float | None = None) -> np.ndarray:
    """Cumulative path length s(t) by composite Simpson on the sampled speed.

    The speed is taken from ``speeds`` when given, otherwise from the classical
    closed form (requires ``omega``).
    """
    if speeds is None:
        if omega is None:
            raise ValueError("need either speeds or omega")
        speeds = classical_speeds(traj, omega)
    s = cumulative_simpson(np.asarray(speeds, dtype=float), x=traj.times, initial=0.0)
    # Simpson weights can dip by rounding on a zero-speed stretch
    return np.maximum.accumulate(s)


def local_maxima(values: np.ndarray) -> np.ndarray:
    """Indices of strict interior local maxima."""
    v = np.asarray(values, dtype=float)
    return np.flatnonzero((v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])) + 1


def local_minima(values: np.ndarray) -> np.ndarray:
    return local_maxima(-np.asarray(values, dtype=float))


def refine_peak(func, t_lo: float, t_hi: float, samples: int = 401, xatol: float = 1e-13) -> tuple[float, float]:
    """Maximum of a scalar function on [t_lo, t_hi]: grid scan then bounded refinement."""
    ts = np.linspace(t_lo, t_hi, samples)
    vals = np.array([func(t) for t in ts])
    finite = np.where(np.isfinite(vals), vals, -np.inf)
    i = int(np.argmax(finite))
    if not np.isfinite(vals[i]) or vals[i] == -np.inf:
        return float(ts[i]), math.inf
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, samples - 1)]
    res = minimize_scalar(lambda t: -func(t), bounds=(lo, hi), method="bounded", options={"xatol": xatol})
    if -res.fun > vals[i]:
        return float(res.x), float(-res.fun)
    return float(ts[i]), float(vals[i])


def plateau_slopes(traj: Trajectory, s: np.ndarray, at_times) -> np.ndarray:
    """ds/dt from the sampled s(t) (second-order differences) at the grid points nearest ``at_times``."""
    slope = np.gradient(s, traj.times)
    idx = np.abs(traj.times[None, :] - np.asarray(at_times)[:, None]).argmin(axis=1)
    return slope[idx]
