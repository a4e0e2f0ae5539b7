"""Command-line scenarios that write figure and table data to CSV or JSON.

Exit codes: 0 success, 2 invalid parameters, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classical import IntegrationError, integrate_classical, rwa_trajectory
from .core import SimConfig, sim_problems
from .geometry import arc_length, classical_curvature, classical_speeds, curvatures_from_derivatives
from .metrics import delta_scan
from .output import write_table
from .quantum import (
    QuantumConfig,
    QuantumModel,
    bloch_kinematics_ehrenfest,
    default_n_max,
    quantum_problems,
    table1_curvatures,
)
from .rotation import cusp_times, rotation_generator, rotation_speed

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3

SIM_KEYS = {"omega", "detuning", "theta0", "t_end", "samples_per_period"}
QUANTUM_KEYS = {"alpha", "theta0", "omega", "n_max", "coupling", "t_end", "samples_per_period"}
SCENARIO_KEYS = {"rwa", "model", "omegas", "reference"}
KNOWN_KEYS = SIM_KEYS | QUANTUM_KEYS | SCENARIO_KEYS

INT_KEYS = {"samples_per_period", "n_max"}


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


class NumericalFailure(RuntimeError):
    pass


def _coerce(raw: dict) -> tuple[dict, list[str]]:
    values, errors = {}, []
    for key, val in raw.items():
        if key not in KNOWN_KEYS:
            errors.append(f"unknown parameter '{key}'")
            continue
        if key in SCENARIO_KEYS:
            values[key] = val
            continue
        try:
            num = float(val)
            if key in INT_KEYS:
                if num != int(num):
                    raise ValueError
                num = int(num)
            values[key] = num
        except (TypeError, ValueError):
            errors.append(f"{key} must be {'an integer' if key in INT_KEYS else 'a number'}, got {val!r}")
    return values, errors


def validate_config(raw: dict) -> SimConfig | QuantumConfig:
    """Build a classical or quantum config, reporting every problem at once.

    The presence of ``alpha`` selects the quantum model. Raises ConfigError.
    """
    values, errors = _coerce({k: v for k, v in raw.items() if v is not None})
    quantum = "alpha" in values
    params = {k: v for k, v in values.items() if k not in SCENARIO_KEYS}
    if "samples_per_period" in params:
        params["samples_per_drive_period"] = params.pop("samples_per_period")

    if quantum:
        if params.pop("detuning", 0.0):
            errors.append("detuning must be 0 for the quantum model (resonant only)")
        alpha = params["alpha"]
        merged = dict(omega=5.0, t_end=math.pi, samples_per_drive_period=256, n_max=None, coupling=None) | params
        if merged["n_max"] is None and alpha >= 0:
            merged["n_max"] = default_n_max(alpha)
        if merged["coupling"] is None and alpha > 0:
            merged["coupling"] = 1 / alpha
        merged.pop("theta0", None)
        errors += quantum_problems(**merged)
        if errors:
            raise ConfigError(errors)
        return QuantumConfig(**params)

    for key in sorted(params.keys() - SIM_KEYS - {"samples_per_drive_period"}):
        errors.append(f"{key} applies only to the quantum model (set alpha)")
        params.pop(key)
    merged = dict(omega=5.0, t_end=math.pi, samples_per_drive_period=256) | params
    errors += sim_problems(merged["omega"], merged["t_end"], merged["samples_per_drive_period"])
    if errors:
        raise ConfigError(errors)
    return SimConfig(**params)


@dataclass
class ScenarioSpec:
    name: str
    parameters: dict = field(default_factory=dict)
    output_path: str | Path = "out.csv"
    format: str = "csv"


def _classical_cfg(params) -> SimConfig:
    cfg = validate_config({k: v for k, v in params.items() if k not in SCENARIO_KEYS})
    if isinstance(cfg, QuantumConfig):
        raise ConfigError(["alpha is not a parameter of this scenario"])
    return cfg


def _quantum_cfg(params) -> QuantumConfig:
    raw = {k: v for k, v in params.items() if k not in SCENARIO_KEYS}
    raw.setdefault("alpha", 5.0)
    return validate_config(raw)


def _run_classical(cfg: SimConfig):
    try:
        return integrate_classical(cfg)
    except IntegrationError as exc:
        raise NumericalFailure(str(exc)) from exc


def _audit_bloch(bloch: np.ndarray, states=None):
    if np.any(np.linalg.norm(bloch, axis=1) > 1 + 1e-9):
        raise NumericalFailure("Bloch vector left the unit ball")
    if states is not None:
        drift = np.max(np.abs(np.sum(np.abs(states) ** 2, axis=1) - 1))
        if drift > 1e-9:
            raise NumericalFailure(f"norm drift {drift:.3g}")


def _audit_monotone(s):
    if np.any(np.diff(s) < 0):
        raise NumericalFailure("arc length decreased")


def _kappa_series(traj, omega):
    return np.array([classical_curvature(r, t, omega) for t, r in zip(traj.times, traj.bloch)])


def scenario_classical_path(p):
    cfg = _classical_cfg(p)
    if p.get("rwa"):
        traj = rwa_trajectory(cfg.output_times(), cfg.theta0)
        speeds = np.full(len(traj), 2.0)
        kappa = np.ones(len(traj))
    else:
        if cfg.detuning:
            raise ConfigError(["classical-path geometry needs detuning = 0"])
        traj = _run_classical(cfg)
        speeds = classical_speeds(traj, cfg.omega)
        kappa = _kappa_series(traj, cfg.omega)
    _audit_bloch(traj.bloch, traj.states)
    s = arc_length(traj, speeds)
    _audit_monotone(s)
    ref = rwa_trajectory(traj.times, cfg.theta0)
    cols = {"t": traj.times, "X": traj.X, "Y": traj.Y, "Z": traj.Z, "s": s, "kappa": kappa,
            "X_rwa": ref.X, "Y_rwa": ref.Y, "Z_rwa": ref.Z}
    return cols, {"scenario": "classical-path", "rwa": bool(p.get("rwa")), **vars_of(cfg)}, {}


def scenario_rotation_profile(p):
    cfg = _classical_cfg(p)
    t = cfg.output_times()
    speed = rotation_speed(t, cfg.omega)
    with np.errstate(invalid="ignore", divide="ignore"):
        axis = rotation_generator(t, cfg.omega) / speed[:, None]
    axis[speed < 1e-14] = np.nan
    cols = {"t": t, "theta_dot": speed, "n_X": axis[:, 0], "n_Y": axis[:, 1]}
    return cols, {"scenario": "rotation-profile", **vars_of(cfg)}, {}


def scenario_curvature(p):
    cfg = _classical_cfg(p)
    traj = _run_classical(cfg)
    _audit_bloch(traj.bloch, traj.states)
    cols = {"t": traj.times, "omega_t": cfg.omega * traj.times, "kappa": _kappa_series(traj, cfg.omega)}
    return cols, {"scenario": "curvature", **vars_of(cfg)}, {}


def scenario_arclength(p):
    cfg = _classical_cfg(p)
    traj = _run_classical(cfg)
    _audit_bloch(traj.bloch, traj.states)
    speeds = classical_speeds(traj, cfg.omega)
    s = arc_length(traj, speeds)
    _audit_monotone(s)
    cols = {"t": traj.times, "s": s, "s_dot": speeds, "s_rwa": 2 * traj.times}
    return cols, {"scenario": "arclength", **vars_of(cfg)}, {"s_end": s[-1], "s_rwa_end": 2 * traj.times[-1]}


def scenario_quantum_path(p):
    cfg = _quantum_cfg(p)
    model = QuantumModel(cfg, rwa=bool(p.get("rwa")))
    times = cfg.output_times()
    states = model.states(times)
    traj = model.trajectory(times)
    _audit_bloch(traj.bloch, states)
    kin = [bloch_kinematics_ehrenfest(psi, t, model.H, cfg) for psi, t in zip(states, times)]
    v = np.array([k.v for k in kin])
    a = np.array([k.a for k in kin])
    s = arc_length(traj, np.linalg.norm(v, axis=1))
    _audit_monotone(s)
    cols = {"t": times, "X": traj.X, "Y": traj.Y, "Z": traj.Z, "R": np.linalg.norm(traj.bloch, axis=1),
            "s": s, "kappa": curvatures_from_derivatives(v, a)}
    return cols, {"scenario": "quantum-path", "rwa": bool(p.get("rwa")), **vars_of(cfg)}, {}


TABLE1_CASES = [(1.0, 0.0), (1.0, math.pi), (5.0, 0.0)]


def scenario_table1(p):
    omega = float(p.get("omega", 5.0))
    if not omega > 0:
        raise ConfigError(["omega must be positive"])
    unknown = set(p) - {"omega"}
    if unknown:
        raise ConfigError([f"unknown parameter '{k}' for table1" for k in sorted(unknown)])
    rows = [table1_curvatures(a, th, omega) for a, th in TABLE1_CASES]
    cols = {"alpha": [a for a, _ in TABLE1_CASES], "theta0": [th for _, th in TABLE1_CASES]}
    for key in ("kappa_peak1", "kappa_peak2", "t_peak1", "t_peak2", "kappa_at_t1", "kappa_at_t2"):
        cols[key] = [r[key] for r in rows]
    return cols, {"scenario": "table1", "omega": omega}, {}


def _parse_omegas(val) -> list[float]:
    if isinstance(val, str):
        parts = [x for x in val.split(",") if x.strip()]
    else:
        parts = list(val)
    try:
        out = [float(x) for x in parts]
    except ValueError:
        raise ConfigError([f"omegas must be a comma-separated list of numbers, got {val!r}"])
    if not out or any(w <= 0 for w in out):
        raise ConfigError(["omegas must be positive"])
    return out


def scenario_delta_scan(p):
    omegas = _parse_omegas(p.get("omegas", "10,20,40,80,160"))
    model = p.get("model", "classical")
    spp = int(p.get("samples_per_period", 64))
    unknown = set(p) - {"omegas", "model", "alpha", "samples_per_period", "reference"}
    errors = [f"unknown parameter '{k}' for delta-scan" for k in sorted(unknown)]
    if model not in ("classical", "quantum"):
        errors.append(f"model must be 'classical' or 'quantum', got {model!r}")
    if model == "quantum" and p.get("alpha") is None:
        errors.append("quantum model needs alpha")
    if spp < 16:
        errors.append("samples_per_drive_period must be an integer >= 16")
    if errors:
        raise ConfigError(errors)
    alpha = float(p["alpha"]) if model == "quantum" else None
    reference = p.get("reference", "jc")
    res = delta_scan(omegas, model, alpha=alpha, samples_per_drive_period=spp, reference=reference)
    if not res.omegas:
        raise NumericalFailure(f"every frequency failed: {res.failures}")
    params = {"scenario": "delta-scan", "model": res.model, "omegas": ";".join(fmt_num(w) for w in omegas),
              "samples_per_drive_period": spp, "tau": math.pi}
    if model == "quantum":
        params["reference"] = reference
    notes = {f"failed_omega_{fmt_num(w)}": msg.replace(",", ";") for w, msg in res.failures.items()}
    notes["fitted_loglog_slope"] = res.fitted_loglog_slope
    return {"omega": res.omegas, "delta": res.deltas}, params, notes


def scenario_cusps(p):
    cfg = _classical_cfg(p)
    tk = cusp_times(cfg.omega, cfg.t_end)
    return {"k": np.arange(len(tk)), "t_k": tk}, {"scenario": "cusps", **vars_of(cfg)}, {}


def fmt_num(x) -> str:
    return format(float(x), "g")


def vars_of(cfg) -> dict:
    return dict(vars(cfg))


SCENARIOS = {
    "classical-path": scenario_classical_path,
    "rotation-profile": scenario_rotation_profile,
    "curvature": scenario_curvature,
    "arclength": scenario_arclength,
    "quantum-path": scenario_quantum_path,
    "table1": scenario_table1,
    "delta-scan": scenario_delta_scan,
    "cusps": scenario_cusps,
}


def run_scenario(spec: ScenarioSpec, stderr=None) -> int:
    stderr = stderr or sys.stderr
    if spec.name not in SCENARIOS:
        print(f"error: unknown scenario {spec.name!r}", file=stderr)
        return EXIT_INVALID
    if spec.format not in ("csv", "json"):
        print(f"error: format must be csv or json, got {spec.format!r}", file=stderr)
        return EXIT_INVALID
    try:
        cols, params, notes = SCENARIOS[spec.name](dict(spec.parameters))
        write_table(spec.output_path, cols, params, spec.format, notes)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"error: {err}", file=stderr)
        return EXIT_INVALID
    except (NumericalFailure, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


FLAG_KEYS = {
    "omega": "omega", "detuning": "detuning", "theta0": "theta0", "alpha": "alpha", "n_max": "n_max",
    "t_end": "t_end", "samples_per_period": "samples_per_period", "coupling": "coupling",
    "model": "model", "omegas": "omegas", "reference": "reference",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blochpath", description=__doc__)
    sub = parser.add_subparsers(dest="scenario", required=True)
    for name in SCENARIOS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, help="TOML file of key = value parameters (flags override)")
        sp.add_argument("--omega")
        sp.add_argument("--detuning")
        sp.add_argument("--theta0")
        sp.add_argument("--alpha")
        sp.add_argument("--n-max", dest="n_max")
        sp.add_argument("--coupling")
        sp.add_argument("--t-end", dest="t_end")
        sp.add_argument("--samples-per-period", dest="samples_per_period")
        sp.add_argument("--rwa", action="store_true", default=None)
        sp.add_argument("--model")
        sp.add_argument("--omegas")
        sp.add_argument("--reference", choices=["jc", "classical-rwa"])
        sp.add_argument("--out", required=True, type=Path)
        sp.add_argument("--format", choices=["csv", "json"], default="csv")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    params = {}
    if args.config is not None:
        try:
            params.update({k.replace("-", "_"): v for k, v in tomllib.loads(args.config.read_text()).items()})
        except (OSError, tomllib.TOMLDecodeError) as exc:
            print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
            return EXIT_INVALID
    for attr in list(FLAG_KEYS) + ["rwa"]:
        val = getattr(args, attr)
        if val is not None:
            params[attr] = val
    return run_scenario(ScenarioSpec(args.scenario, params, args.out, args.format))


if __name__ == "__main__":
    sys.exit(main())
