"""Two-level system coupled to one quantized field mode.

Joint basis ordering is |q>|n>_p -> index q*(n_max+1) + n with q in {0, 1}.
|0> is the ground state (Bloch north pole) and sigma_+|0> = |1>. At resonance
(omega_a = omega)

    H = (omega/2)(|1><1| - |0><0|) + omega (a^dag a + 1/2)
        + lam (sigma_+ + sigma_-)(a^dag + a)

and the Jaynes-Cummings limit keeps only lam (sigma_+ a + sigma_- a^dag).
Bloch vectors are reported in the frame rotating at omega_a so they compare
directly with the classical interaction-picture paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .core import BlochVector, Trajectory, config_snapshot, sim_problems, uniform_times
from .geometry import KinematicSample, curvature_from_derivatives, refine_peak

TAIL_TOL = 1e-12


class CutoffError(ValueError):
    """The Fock cutoff leaves too much coherent-state weight outside the basis."""


def default_n_max(alpha: float) -> int:
    return math.ceil(alpha**2 + 8 * alpha + 20)


def coherent_tail_mass(alpha: float, n_max: int) -> float:
    """Weight of a coherent state on photon numbers above ``n_max``."""
    if alpha == 0:
        return 0.0
    return float(poisson.sf(n_max, alpha**2))


def quantum_problems(alpha, omega, n_max, coupling, t_end, samples_per_drive_period) -> list[str]:
    """Every range or cutoff violation of a quantum configuration."""
    errors = sim_problems(omega, t_end, samples_per_drive_period)
    if not alpha >= 0:
        errors.append("alpha must be non-negative")
    if n_max is None or int(n_max) != n_max or n_max < 1:
        errors.append("n_max must be a positive integer")
    elif alpha >= 0:
        tail = coherent_tail_mass(alpha, int(n_max))
        if tail >= TAIL_TOL:
            errors.append(f"n_max={n_max} too small for alpha={alpha}: tail mass {tail:.3g} >= {TAIL_TOL:g}")
    if coupling is None:
        errors.append("coupling must be given explicitly when alpha = 0")
    return errors


@dataclass(frozen=True)
class QuantumConfig:
    alpha: float = 5.0
    theta0: float = 0.0
    omega: float = 5.0
    n_max: int | None = None
    coupling: float | None = None
    t_end: float = math.pi
    samples_per_drive_period: int = 256

    def __post_init__(self):
        if self.n_max is None:
            object.__setattr__(self, "n_max", default_n_max(self.alpha))
        if self.coupling is None and self.alpha > 0:
            object.__setattr__(self, "coupling", 1.0 / self.alpha)
        errors = self.problems()
        if errors:
            raise ValueError("; ".join(errors))

    def problems(self) -> list[str]:
        return quantum_problems(
            self.alpha, self.omega, self.n_max, self.coupling, self.t_end, self.samples_per_drive_period
        )

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)

    def output_times(self) -> np.ndarray:
        return uniform_times(self.omega, self.t_end, self.samples_per_drive_period)


def coherent_amplitudes(alpha: float, n_max: int) -> np.ndarray:
    """Fock amplitudes c_n = exp(-alpha^2/2) alpha^n / sqrt(n!) for n <= n_max."""
    tail = coherent_tail_mass(alpha, n_max)
    if tail >= TAIL_TOL:
        raise CutoffError(f"tail mass {tail:.3g} beyond n_max={n_max} for alpha={alpha}")
    n = np.arange(n_max + 1)
    if alpha == 0:
        return (n == 0).astype(complex)
    log_c = -0.5 * alpha**2 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(log_c) * np.sign(alpha) ** n + 0j


def joint_initial_state(cfg: QuantumConfig) -> np.ndarray:
    qubit = np.array([math.cos(cfg.theta0 / 2), math.sin(cfg.theta0 / 2)])
    return np.kron(qubit, coherent_amplitudes(cfg.alpha, cfg.n_max))


def free_energies(cfg: QuantumConfig) -> np.ndarray:
    """Diagonal of the uncoupled Hamiltonian, including the zero-point term."""
    n = np.arange(cfg.n_max + 1)
    field_e = cfg.omega * (n + 0.5)
    return np.concatenate([-cfg.omega / 2 + field_e, cfg.omega / 2 + field_e])


def _annihilation(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1)


def coupling_operator(cfg: QuantumConfig, rwa: bool = False) -> np.ndarray:
    a = _annihilation(cfg.n_max)
    d = cfg.n_max + 1
    h = np.zeros((2 * d, 2 * d))
    # block (1, 0) is <1|.|0>, i.e. the sigma_+ part
    raise_block = a if rwa else a + a.T
    h[d:, :d] = cfg.coupling * raise_block
    h[:d, d:] = cfg.coupling * raise_block.T
    return h


def build_hamiltonian(cfg: QuantumConfig, rwa: bool = False) -> np.ndarray:
    return np.diag(free_energies(cfg)) + coupling_operator(cfg, rwa)


def excitation_number(n_max: int) -> np.ndarray:
    """Diagonal of a^dag a + |1><1|."""
    n = np.arange(n_max + 1, dtype=float)
    return np.concatenate([n, n + 1])


@dataclass(frozen=True)
class SpectralPropagator:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @classmethod
    def from_hamiltonian(cls, H: np.ndarray) -> "SpectralPropagator":
        try:
            w, U = np.linalg.eigh(H)
        except np.linalg.LinAlgError as exc:
            raise RuntimeError(f"diagonalization failed: {exc}") from exc
        err = np.max(np.abs(H - (U * w) @ U.conj().T))
        if err >= 1e-9 * max(np.max(np.abs(H)), 1.0):
            raise RuntimeError(f"eigendecomposition reconstruction error {err:.3g}")
        return cls(w, U)

    def evolve(self, psi0: np.ndarray, times) -> np.ndarray:
        """States exp(-iHt) psi0 for each t; shape (len(times), dim)."""
        U = self.eigenvectors
        coeffs = U.conj().T @ np.asarray(psi0, dtype=complex)
        times = np.atleast_1d(np.asarray(times, dtype=float))
        phases = np.exp(-1j * np.outer(times, self.eigenvalues))
        return (phases * coeffs) @ U.T


def evolve_spectral(H: np.ndarray, psi0: np.ndarray, times) -> np.ndarray:
    return SpectralPropagator.from_hamiltonian(H).evolve(psi0, times)


def reduced_density_matrix(psi: np.ndarray) -> np.ndarray:
    """Qubit state after tracing out the field, in the Schroedinger picture."""
    block = np.asarray(psi).reshape(2, -1)
    return block @ block.conj().T


def _frame_bloch(states: np.ndarray, times, omega_a: float) -> np.ndarray:
    states = np.atleast_2d(states)
    d = states.shape[1] // 2
    p0, p1 = states[:, :d], states[:, d:]
    coh = np.sum(np.conj(p0) * p1, axis=1) * np.exp(1j * omega_a * np.atleast_1d(times))
    z = np.sum(np.abs(p0) ** 2, axis=1) - np.sum(np.abs(p1) ** 2, axis=1)
    return np.stack([2 * coh.real, 2 * coh.imag, z], axis=1)


def reduced_bloch_interaction_frame(psi: np.ndarray, t: float, cfg: QuantumConfig) -> BlochVector:
    return BlochVector.from_array(_frame_bloch(psi, t, cfg.omega)[0])


def _pauli_apply(phi: np.ndarray) -> list[np.ndarray]:
    d = len(phi) // 2
    p0, p1 = phi[:d], phi[d:]
    return [
        np.concatenate([p1, p0]),
        np.concatenate([-1j * p1, 1j * p0]),
        np.concatenate([p0, -p1]),
    ]


def bloch_kinematics_ehrenfest(psi: np.ndarray, t: float, H: np.ndarray, cfg: QuantumConfig) -> KinematicSample:
    """Reduced Bloch vector with exact first and second time derivatives.

    Works in the interaction picture of the free Hamiltonian, where
    dR_i/dt = <i[H_I(t), sigma_i]> and
    d2R_i/dt2 = <i[H_I, i[H_I, sigma_i]]> + <i[dH_I/dt, sigma_i]>.
    """
    energies = free_energies(cfg)
    coupling = H - np.diag(energies)
    gap = energies[:, None] - energies[None, :]
    h_int = coupling * np.exp(1j * gap * t)
    dh_int = 1j * gap * h_int

    phi = np.exp(1j * energies * t) * np.asarray(psi, dtype=complex)
    h_phi = h_int @ phi
    hh_phi = h_int @ h_phi
    dh_phi = dh_int @ phi

    r, v, a = np.empty(3), np.empty(3), np.empty(3)
    for i, s_phi in enumerate(_pauli_apply(phi)):
        r[i] = np.vdot(phi, s_phi).real
        v[i] = -2 * np.vdot(h_phi, s_phi).imag
        s_h_phi = _pauli_apply(h_phi)[i]
        a[i] = -2 * np.vdot(hh_phi, s_phi).real + 2 * np.vdot(h_phi, s_h_phi).real - 2 * np.vdot(dh_phi, s_phi).imag

    s_dot = float(np.linalg.norm(v))
    s_ddot = float(v @ a / s_dot) if s_dot > 0 else 0.0
    return KinematicSample(
        t=float(t),
        r=BlochVector.from_array(r),
        v=v,
        a=a,
        s_dot=s_dot,
        s_ddot=s_ddot,
        kappa=curvature_from_derivatives(v, a),
    )


@dataclass
class QuantumModel:
    """A configured Hamiltonian with its spectral decomposition and initial state."""

    cfg: QuantumConfig
    rwa: bool = False
    H: np.ndarray = field(init=False, repr=False)
    propagator: SpectralPropagator = field(init=False, repr=False)
    psi0: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.H = build_hamiltonian(self.cfg, self.rwa)
        self.propagator = SpectralPropagator.from_hamiltonian(self.H)
        self.psi0 = joint_initial_state(self.cfg)

    def states(self, times) -> np.ndarray:
        return self.propagator.evolve(self.psi0, times)

    def bloch(self, times) -> np.ndarray:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        return _frame_bloch(self.states(times), times, self.cfg.omega)

    def kinematics(self, t: float) -> KinematicSample:
        return bloch_kinematics_ehrenfest(self.states([t])[0], t, self.H, self.cfg)

    def curvature(self, t: float) -> float:
        return self.kinematics(t).kappa

    def trajectory(self, times=None, keep_states: bool = False) -> Trajectory:
        times = self.cfg.output_times() if times is None else np.asarray(times, dtype=float)
        states = self.states(times)
        meta = config_snapshot(self.cfg) | {"rwa": self.rwa}
        return Trajectory(times, _frame_bloch(states, times, self.cfg.omega), states if keep_states else None, meta)


def quantum_trajectory(cfg: QuantumConfig, times=None, rwa: bool = False, keep_states: bool = False) -> Trajectory:
    return QuantumModel(cfg, rwa).trajectory(times, keep_states)


def jaynes_cummings_trajectory(cfg: QuantumConfig, times=None, keep_states: bool = False) -> Trajectory:
    return quantum_trajectory(cfg, times, rwa=True, keep_states=keep_states)


def peak_curvature(model: QuantumModel, t_center: float, half_width: float | None = None) -> tuple[float, float]:
    """Largest curvature within ``half_width`` of ``t_center``; returns (t_peak, kappa).

    The default window is half the cusp spacing, pi / (2 omega).
    """
    if half_width is None:
        half_width = math.pi / (2 * model.cfg.omega)
    lo = max(t_center - half_width, 0.0)
    return refine_peak(model.curvature, lo, t_center + half_width)


def table1_curvatures(alpha: float, theta0: float, omega: float = 5.0, n_max: int | None = None) -> dict[str, float]:
    """Curvature peaks near t1 = pi/(2 omega) and t2 = 3 pi/(2 omega), plus the values exactly there."""
    model = QuantumModel(QuantumConfig(alpha=alpha, theta0=theta0, omega=omega, n_max=n_max))
    t1, t2 = math.pi / (2 * omega), 3 * math.pi / (2 * omega)
    tp1, k1 = peak_curvature(model, t1)
    tp2, k2 = peak_curvature(model, t2)
    return {
        "kappa_peak1": k1,
        "kappa_peak2": k2,
        "t_peak1": tp1,
        "t_peak2": tp2,
        "kappa_at_t1": model.curvature(t1),
        "kappa_at_t2": model.curvature(t2),
    }
