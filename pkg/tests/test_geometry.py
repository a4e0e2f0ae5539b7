import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blochpath.classical import bloch_velocity_from_state, integrate_classical, rwa_trajectory
from blochpath.core import SimConfig, Trajectory
from blochpath.geometry import (
    arc_length,
    axis_drift_acceleration,
    classical_acceleration,
    classical_curvature,
    classical_kinematics,
    classical_speeds,
    classical_velocity,
    curvature_from_derivatives,
    curvatures_from_derivatives,
    local_maxima,
    local_minima,
    plateau_slopes,
    refine_peak,
    speed_and_sddot,
)
from blochpath.rotation import cusp_times, rotation_generator

W = 5.0


def velocity_by_hand(r, t, w):
    """Component formulas for dR/dt at resonance, written out independently.

    From the north pole the amplitude equations give Y ~ -4t at first, which
    fixes the overall sign.
    """
    x, y, z = r
    c, s = math.cos(w * t), math.sin(w * t)
    return -np.array([-4 * z * s * c, 4 * z * c * c, 4 * c * (x * s - y * c)])


def random_sphere_point(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


@pytest.mark.parametrize(
    "r, t, expected",
    [((0, 0, 1), 0.0, (0, -4, 0)), ((0, -1, 0), 0.0, (0, 0, -4))],
)
def test_velocity_examples(r, t, expected):
    assert np.allclose(classical_velocity(r, t, W), expected, atol=1e-15)


def test_velocity_vanishes_at_cusps():
    rng = np.random.default_rng(0)
    for tk in cusp_times(W, math.pi):
        assert np.linalg.norm(classical_velocity(random_sphere_point(rng), tk, W)) < 1e-14


def test_velocity_matches_component_oracle_and_cross_identity():
    rng = np.random.default_rng(1)
    for _ in range(200):
        r, t = random_sphere_point(rng), rng.uniform(0, math.pi)
        v = classical_velocity(r, t, W)
        assert np.allclose(v, velocity_by_hand(r, t, W), atol=1e-12)
        assert np.allclose(v, np.cross(rotation_generator(t, W), r), atol=1e-12)


def test_velocity_matches_amplitude_derivative(traj_w5):
    for i in range(0, len(traj_w5), 37):
        t, psi = traj_w5.times[i], traj_w5.states[i]
        v_ode = bloch_velocity_from_state(t, psi, W)
        assert np.allclose(classical_velocity(traj_w5.bloch[i], t, W), v_ode, atol=1e-12)


@pytest.mark.parametrize("r, expected", [((0, 0, 1), (20, 0, 0)), ((1, 0, 0), (0, 0, -20))])
def test_axis_drift_part_examples(r, expected):
    assert np.allclose(axis_drift_acceleration(r, 0.0, W), expected, atol=1e-14)


def test_full_acceleration_adds_centripetal_term():
    # w = (4, 0, 0) at t = 0, so w x (w x z_hat) = (0, 0, -16)
    assert np.allclose(classical_acceleration((0, 0, 1), 0.0, W), (20, 0, -16), atol=1e-14)


def test_acceleration_matches_finite_differences():
    # central differences of the sampled velocity; error falls as dt^2
    errs = []
    for spp in (256, 512):
        tr = integrate_classical(SimConfig(omega=W, samples_per_drive_period=spp))
        v = classical_velocity(tr.bloch, tr.times, W)
        dt = tr.times[1] - tr.times[0]
        fd = (v[2:] - v[:-2]) / (2 * dt)
        a = classical_acceleration(tr.bloch[1:-1], tr.times[1:-1], W)
        errs.append(np.max(np.linalg.norm(fd - a, axis=1)))
    assert errs[1] < 1e-2
    assert 3.5 < errs[0] / errs[1] < 4.5


def test_speed_examples_and_identity():
    assert speed_and_sddot((0, 0, 1), 0.0, W).s_dot == pytest.approx(4.0, abs=1e-15)
    tk = math.pi / (2 * W)
    sp = speed_and_sddot((0.3, 0.4, math.sqrt(0.75)), tk, W)
    assert sp.s_dot == pytest.approx(0.0, abs=1e-14)
    rng = np.random.default_rng(2)
    for _ in range(200):
        r, t = random_sphere_point(rng), rng.uniform(0, math.pi)
        assert speed_and_sddot(r, t, W).s_dot == pytest.approx(np.linalg.norm(classical_velocity(r, t, W)), abs=1e-12)


def test_sddot_is_tangential_acceleration():
    rng = np.random.default_rng(4)
    for _ in range(200):
        r, t = random_sphere_point(rng), rng.uniform(0, math.pi)
        v, a = classical_velocity(r, t, W), classical_acceleration(r, t, W)
        sp = speed_and_sddot(r, t, W)
        if sp.s_dot < 1e-6:
            continue
        assert sp.s_ddot == pytest.approx(np.dot(v, a) / sp.s_dot, abs=1e-9)


def test_sddot_one_sided_at_cusp():
    sp = speed_and_sddot((0, 0, 1), math.pi / 2, 1.0)
    assert sp.one_sided
    # right-hand limit: d/dt (4|cos t| * 1) -> +4 just after the cusp
    h = 1e-7
    rhs = (speed_and_sddot((0, 0, 1), math.pi / 2 + h, 1.0).s_dot - sp.s_dot) / h
    assert sp.s_ddot == pytest.approx(rhs, rel=1e-5)
    assert not speed_and_sddot((0, 0, 1), 0.1, 1.0).one_sided


def test_curvature_from_derivatives_examples():
    assert curvature_from_derivatives((2, 0, 0), (0, 2, 0)) == pytest.approx(0.5)
    assert curvature_from_derivatives((1, 2, 3), (2, 4, 6)) == pytest.approx(0.0, abs=1e-15)
    assert curvature_from_derivatives((0, 0, 0), (1, 0, 0)) == math.inf
    vec = curvatures_from_derivatives(np.array([[2.0, 0, 0], [0, 0, 0]]), np.array([[0, 2.0, 0], [1, 0, 0]]))
    assert vec[0] == pytest.approx(0.5) and vec[1] == math.inf


def test_unit_circle_has_unit_curvature():
    t = np.linspace(0, math.pi, 257)
    r = np.stack([0 * t, -np.sin(2 * t), np.cos(2 * t)], axis=1)
    v = np.stack([0 * t, -2 * np.cos(2 * t), -2 * np.sin(2 * t)], axis=1)
    a = np.stack([0 * t, 4 * np.sin(2 * t), -4 * np.cos(2 * t)], axis=1)
    assert np.allclose(curvatures_from_derivatives(v, a), 1.0, atol=1e-8)
    assert np.allclose(np.linalg.norm(r, axis=1), 1.0)


def test_two_curvature_formulas_agree(traj_w5):
    rng = np.random.default_rng(5)
    for i in rng.choice(len(traj_w5), 100, replace=False):
        r, t = traj_w5.bloch[i], traj_w5.times[i]
        k_gen = curvature_from_derivatives(classical_velocity(r, t, W), classical_acceleration(r, t, W))
        k_cls = classical_curvature(r, t, W)
        if math.isinf(k_cls):
            continue
        assert k_cls == pytest.approx(k_gen, rel=1e-8)


def test_curvature_diverges_toward_first_cusp():
    t0 = math.pi / (2 * W)
    ks = []
    for m in (2, 3, 4):
        t = t0 - 10.0**-m
        tr = integrate_classical(SimConfig(omega=W, t_end=t))
        ks.append(classical_curvature(tr.bloch[-1], t, W))
    assert ks[0] < ks[1] < ks[2]
    assert ks[1] > 1e2


def test_curvature_signal_at_exact_cusp():
    assert classical_curvature((0, 0, 1), math.pi / 2, 1.0) == math.inf


def test_curvature_at_speed_maxima_grows_with_omega():
    # frozen: kappa at t = pi/omega does not settle at 1 but grows roughly like omega
    vals = {}
    for w in (20.0, 40.0):
        tr = integrate_classical(SimConfig(omega=w, t_end=math.pi / w))
        vals[w] = classical_curvature(tr.bloch[-1], math.pi / w, w)
    assert vals[40.0] > 1.5 * vals[20.0]


def test_kinematics_invariants(traj_w5):
    for k in classical_kinematics(traj_w5, W)[::50]:
        assert k.s_dot == pytest.approx(np.linalg.norm(k.v), abs=1e-10)
        assert k.kappa >= 0


def test_rwa_arc_length_is_2t():
    t = np.linspace(0, math.pi, 1025)
    tr = rwa_trajectory(t)
    s = arc_length(tr, speeds=np.full_like(t, 2.0))
    assert s[-1] == pytest.approx(2 * math.pi, abs=1e-12)
    assert np.allclose(s, 2 * t, atol=1e-12)


def test_exact_path_longer_and_plateaus(traj_w5):
    s = arc_length(traj_w5, omega=W)
    assert s[0] == 0.0
    assert np.all(np.diff(s) >= 0)
    assert s[-1] > 2 * math.pi
    slopes = plateau_slopes(traj_w5, s, cusp_times(W, math.pi))
    assert np.all(slopes < 0.05)
    assert np.all(classical_speeds(traj_w5, W) <= 4 + 1e-12)


def test_arc_length_requires_speed_source(traj_w5):
    with pytest.raises(ValueError):
        arc_length(traj_w5)


def test_extrema_helpers():
    v = np.array([0, 2, 1, 3, 0, 1, 1])
    assert list(local_maxima(v)) == [1, 3]
    assert list(local_minima(v)) == [2, 4]
    t, val = refine_peak(lambda x: -((x - 0.3) ** 2) + 1, 0.0, 1.0)
    assert t == pytest.approx(0.3, abs=1e-6) and val == pytest.approx(1.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.5, 50), st.floats(0, 3))
def test_speed_bounded_by_four(omega, t):
    r = np.array([0.6, -0.0, 0.8])
    assert 0 <= speed_and_sddot(r, t, omega).s_dot <= 4 + 1e-12


def test_trajectory_plumbing_for_quantum_speeds():
    t = np.linspace(0, 1, 11)
    tr = Trajectory(t, np.tile([0, 0, 1.0], (11, 1)))
    assert np.allclose(arc_length(tr, speeds=np.ones(11)), t)
