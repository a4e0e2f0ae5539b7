"""Distances between exact and RWA Bloch evolutions and the gate-error scan."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .classical import integrate_classical, rwa_trajectory
from .core import BlochVector, SimConfig, Trajectory, uniform_times
from .quantum import QuantumConfig, QuantumModel


def pointwise_distance(r, r_rwa) -> float:
    a = r.as_array() if isinstance(r, BlochVector) else np.asarray(r, dtype=float)
    b = r_rwa.as_array() if isinstance(r_rwa, BlochVector) else np.asarray(r_rwa, dtype=float)
    return float(np.linalg.norm(a - b))


def distance_series(traj: Trajectory, ref: Trajectory) -> np.ndarray:
    _check_grids(traj, ref)
    return np.linalg.norm(traj.bloch - ref.bloch, axis=1)


def _check_grids(traj: Trajectory, ref: Trajectory):
    if len(traj.times) != len(ref.times) or not np.allclose(traj.times, ref.times, rtol=0, atol=1e-12):
        raise ValueError("trajectories are not sampled on the same time grid")


def rms_gate_error(traj_exact: Trajectory, traj_rwa: Trajectory, tau: float = math.pi) -> float:
    """sqrt((1/tau) * integral_0^tau |R - R_rwa|^2 dt), composite Simpson."""
    _check_grids(traj_exact, traj_rwa)
    t = traj_exact.times
    if t[0] > 1e-12 or t[-1] < tau - 1e-9:
        raise ValueError(f"trajectories must cover [0, {tau}]")
    keep = t <= tau + 1e-9
    d2 = np.sum((traj_exact.bloch[keep] - traj_rwa.bloch[keep]) ** 2, axis=1)
    return math.sqrt(max(simpson(d2, x=t[keep]) / tau, 0.0))


@dataclass
class DeltaScanResult:
    omegas: list[float]
    deltas: list[float]
    fitted_loglog_slope: float  # nan when fewer than two frequencies succeeded
    model: str = "classical"
    failures: dict[float, str] = field(default_factory=dict)

    @property
    def slope_defined(self) -> bool:
        return not math.isnan(self.fitted_loglog_slope)


def loglog_slope(xs, ys) -> float:
    if len(xs) < 2:
        return math.nan
    slope, _ = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope)


def classical_delta(omega: float, tau: float = math.pi, samples_per_drive_period: int = 64) -> float:
    cfg = SimConfig(omega=omega, t_end=tau, samples_per_drive_period=samples_per_drive_period)
    exact = integrate_classical(cfg)
    return rms_gate_error(exact, rwa_trajectory(exact.times), tau)


def quantum_delta(
    omega: float,
    alpha: float,
    tau: float = math.pi,
    samples_per_drive_period: int = 64,
    reference: str = "jc",
    n_max: int | None = None,
) -> float:
    """Gate error of the full quantum model.

    ``reference="jc"`` compares against the Jaynes-Cummings evolution with the
    same field state; ``"classical-rwa"`` against the classical RWA circle.
    """
    cfg = QuantumConfig(alpha=alpha, omega=omega, n_max=n_max, t_end=tau, samples_per_drive_period=samples_per_drive_period)
    times = uniform_times(omega, tau, samples_per_drive_period)
    exact = QuantumModel(cfg).trajectory(times)
    if reference == "jc":
        ref = QuantumModel(cfg, rwa=True).trajectory(times)
    elif reference == "classical-rwa":
        ref = rwa_trajectory(times, cfg.theta0)
    else:
        raise ValueError(f"unknown reference {reference!r}")
    return rms_gate_error(exact, ref, tau)


def delta_scan(
    omegas,
    model: str = "classical",
    alpha: float | None = None,
    tau: float = math.pi,
    samples_per_drive_period: int = 64,
    reference: str = "jc",
    max_workers: int = 1,
) -> DeltaScanResult:
    """delta at each frequency plus the least-squares slope of log delta vs log omega.

    A frequency whose propagation fails is recorded in ``failures`` and left
    out of the fit; the other results are kept.
    """
    omegas = sorted(float(w) for w in omegas)
    if model == "classical":
        def one(w):
            return classical_delta(w, tau, samples_per_drive_period)
        label = "classical"
    elif model == "quantum":
        if alpha is None:
            raise ValueError("quantum model needs alpha")
        def one(w):
            return quantum_delta(w, alpha, tau, samples_per_drive_period, reference)
        label = f"quantum(alpha={alpha:g})"
    else:
        raise ValueError(f"unknown model {model!r}")

    def guarded(w):
        try:
            return w, one(w), None
        except (RuntimeError, ValueError) as exc:
            return w, None, str(exc)

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            results = list(pool.map(guarded, omegas))
    else:
        results = [guarded(w) for w in omegas]

    ok_w = [w for w, d, _ in results if d is not None]
    ok_d = [d for _, d, _ in results if d is not None]
    failures = {w: err for w, _, err in results if err is not None}
    return DeltaScanResult(ok_w, ok_d, loglog_slope(ok_w, ok_d), label, failures)
