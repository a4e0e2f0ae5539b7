import math

import numpy as np
import pytest
from scipy.integrate import quad

from blochpath.classical import integrate_classical, rwa_trajectory
from blochpath.core import SimConfig
from blochpath.rotation import (
    cusp_times,
    generator_rate,
    rotation_axis,
    rotation_generator,
    rotation_speed,
    speed_maximum_times,
    verify_decomposition,
)

W = 5.0


@pytest.mark.parametrize(
    "t, expected",
    [(0.0, 4.0), (math.pi / (2 * W), 0.0), (math.pi / (4 * W), 2 * math.sqrt(2))],
)
def test_rotation_speed_values(t, expected):
    assert rotation_speed(t, W) == pytest.approx(expected, abs=1e-14)


def test_axis_at_origin_and_eighth_period():
    assert np.allclose(rotation_axis(0.0, W), (1, 0, 0), atol=0)
    h = math.sqrt(2) / 2
    assert np.allclose(rotation_axis(math.pi / (4 * W), W), (h, h, 0), atol=1e-15)


def test_axis_flips_across_first_cusp():
    t0 = math.pi / (2 * W)
    before, after = rotation_axis(t0 - 1e-9, W), rotation_axis(t0 + 1e-9, W)
    assert np.allclose(before, (0, 1, 0), atol=1e-8)
    assert np.allclose(after, (0, -1, 0), atol=1e-8)


def test_axis_undefined_exactly_at_cusp():
    assert rotation_axis(math.pi / 2, 1.0) is None
    assert np.allclose(rotation_generator(math.pi / 2, 1.0), 0.0, atol=1e-15)


def test_axis_unit_and_in_plane():
    t = np.linspace(0, math.pi, 1001)
    for ti in t:
        n = rotation_axis(ti, W)
        if n is None:
            continue
        assert abs(np.linalg.norm(n) - 1) < 1e-12
        assert n[2] == 0.0


def test_generator_is_axis_times_speed():
    rng = np.random.default_rng(3)
    for t in rng.uniform(0, math.pi, 200):
        n = rotation_axis(t, W)
        assert np.allclose(rotation_generator(t, W), rotation_speed(t, W) * n, atol=1e-12)


def test_generator_continuous_across_cusps():
    for tk in cusp_times(W, math.pi):
        left, right = rotation_generator(tk - 1e-7, W), rotation_generator(tk + 1e-7, W)
        assert np.linalg.norm(left - right) < 1e-5


def test_generator_rate_matches_finite_difference():
    t, h = 0.37, 1e-6
    fd = (rotation_generator(t + h, W) - rotation_generator(t - h, W)) / (2 * h)
    assert np.allclose(generator_rate(t, W), fd, atol=1e-7)


def test_speed_period_and_integral():
    period = math.pi / W
    t = np.linspace(0, 2, 50)
    assert np.allclose(rotation_speed(t, W), rotation_speed(t + period, W), atol=1e-12)
    integral, _ = quad(lambda s: rotation_speed(s, W), 0, period, points=[period / 2])
    assert integral == pytest.approx(8 / W, rel=1e-12)


@pytest.mark.parametrize(
    "omega, expected",
    [
        (5.0, [math.pi / 10, 3 * math.pi / 10, 5 * math.pi / 10, 7 * math.pi / 10, 9 * math.pi / 10]),
        (2.5, [math.pi / 5, 3 * math.pi / 5, math.pi]),
    ],
)
def test_cusp_times_examples(omega, expected):
    assert np.allclose(cusp_times(omega, math.pi), expected, rtol=0, atol=1e-15)


def test_cusp_times_omega_20():
    tk = cusp_times(20.0, math.pi)
    assert len(tk) == 20
    assert np.allclose(np.diff(tk), math.pi / 20, atol=1e-14)


def test_cusp_times_short_window_and_bad_omega():
    assert len(cusp_times(5.0, 0.1)) == 0
    with pytest.raises(ValueError):
        cusp_times(0.0, 1.0)


def test_speed_maxima_times():
    tm = speed_maximum_times(W, math.pi)
    assert np.allclose(tm, np.arange(6) * math.pi / W)
    assert np.allclose(rotation_speed(tm, W), 4.0)


def _classical(spp):
    return integrate_classical(SimConfig(omega=W, samples_per_drive_period=spp))


def test_decomposition_residual_is_second_order():
    r1 = verify_decomposition(_classical(256), W)
    r2 = verify_decomposition(_classical(512), W)
    r3 = verify_decomposition(_classical(1024), W)
    assert 3.6 < r1 / r2 < 4.4
    assert 3.6 < r2 / r3 < 4.4
    # residual / dt^2 stays bounded as dt shrinks
    dt = [2 * math.pi / W / n for n in (256, 512, 1024)]
    scaled = [r / d**2 for r, d in zip((r1, r2, r3), dt)]
    assert max(scaled) / min(scaled) < 1.1


def test_decomposition_midpoint_rule_is_tighter(traj_w5):
    assert verify_decomposition(traj_w5, W, rule="midpoint") < 1e-5


def test_decomposition_rwa_constant_axis():
    times = _classical(256).times
    traj = rwa_trajectory(times)
    res = verify_decomposition(traj, W, generator=lambda t: np.array([2.0, 0.0, 0.0]))
    assert res < 1e-6


def test_decomposition_rejects_detuning():
    traj = integrate_classical(SimConfig(omega=W, detuning=0.3, t_end=0.5))
    with pytest.raises(NotImplementedError):
        verify_decomposition(traj, W)
