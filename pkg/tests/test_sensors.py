from __future__ import annotations

import math

import numpy as np
import pytest

from corrobs import (LargeErrorModel, LargeErrorProcess, NoiseMixture,
                     SensorConfig, SensorSuite, sample_noise)
from corrobs.sensors import _fold


def rng(seed=0):
    return np.random.default_rng(seed)


# ------------------------------------------------------------------ noise

def test_sample_noise_zero_mixture():
    assert sample_noise(NoiseMixture(), rng()) == 0.0


def test_sample_noise_forced_impulse():
    mix = NoiseMixture(impulse_prob=1.0, impulse_magnitude=5.0)
    vals = {sample_noise(mix, rng(i)) for i in range(50)}
    assert vals <= {5.0, -5.0}
    assert len(vals) == 2


def test_sample_noise_heavy_tails():
    # Rare large impulses on a Gaussian base push the excess kurtosis well
    # above the Gaussian value of 3.
    mix = NoiseMixture(gaussian_std=0.1, impulse_prob=0.01, impulse_magnitude=2.0)
    g = rng(123)
    samples = np.array([sample_noise(mix, g) for _ in range(1_000_000)])
    kurt = float(np.mean((samples - samples.mean()) ** 4) / samples.var() ** 2)
    assert kurt > 3.5


def test_sample_noise_validation():
    with pytest.raises(ValueError):
        NoiseMixture(gaussian_std=-1.0)
    with pytest.raises(ValueError):
        NoiseMixture(impulse_prob=1.5)


# ------------------------------------------------------------- large error

def test_large_error_zero_bound():
    proc = LargeErrorProcess(LargeErrorModel(constant=20.0, bound=0.0), rng())
    assert all(proc.value(t) == 0.0 for t in (0.0, 1.0, 50.0))


def test_large_error_constant_bias():
    proc = LargeErrorProcess(LargeErrorModel(constant=20.0, bound=25.0), rng())
    assert proc.value(0.0) == 20.0
    assert proc.value(123.4) == 20.0


def test_large_error_walk_never_exceeds_bound():
    model = LargeErrorModel(constant=18.0, walk_step=0.5, walk_period=1e-3, bound=20.0)
    proc = LargeErrorProcess(model, rng(42))
    worst = 0.0
    for k in range(1_000_000):
        worst = max(worst, abs(proc.value(k * 1e-3)))
    assert worst <= 20.0


def test_large_error_sinusoid_component():
    model = LargeErrorModel(constant=1.0, sinusoids=((2.0, 0.5, 0.0),), bound=10.0)
    proc = LargeErrorProcess(model, rng())
    t = 0.7
    assert proc.value(t) == pytest.approx(1.0 + 2.0 * math.sin(0.5 * t), rel=1e-12)


def test_large_error_requires_nonnegative_time():
    proc = LargeErrorProcess(LargeErrorModel(bound=1.0), rng())
    with pytest.raises(ValueError):
        proc.value(-0.1)


def test_fold_stays_in_band():
    g = rng(9)
    for _ in range(2000):
        bound = float(g.uniform(0.1, 30))
        assert abs(_fold(float(g.uniform(-200, 200)), bound)) <= bound
    assert _fold(1.5, 1.0) == pytest.approx(0.5)
    assert _fold(0.3, 1.0) == 0.3
    assert _fold(-1.5, 1.0) == pytest.approx(-0.5)


# ---------------------------------------------------------------- measure

def default_config(**kw) -> SensorConfig:
    base = dict(
        position_period=1.0,
        velocity_period=0.01,
        dropouts=(),
        large_error=tuple(LargeErrorModel() for _ in range(6)),
        position_noise=tuple(NoiseMixture() for _ in range(6)),
        velocity_noise=tuple(NoiseMixture() for _ in range(6)),
    )
    base.update(kw)
    return SensorConfig(**base)


def test_measure_noise_free_exact_at_update_instants():
    suite = SensorSuite(default_config(), seed=1, dt=1e-3)
    state = np.arange(12, dtype=float)
    frame = suite.measure(state, 0)
    for axis in range(6):
        assert frame[axis].y_o1 == state[axis]
        assert frame[axis].y_o2 == state[6 + axis]
        assert frame[axis].y_o1_fresh
    assert frame.t == 0.0


def test_measure_holds_between_updates():
    suite = SensorSuite(default_config(), seed=1, dt=1e-3)
    s0 = np.arange(12, dtype=float)
    suite.measure(s0, 0)
    moved = s0 + 5.0
    frame = suite.measure(moved, 500)  # t = 0.5 s: position stale, velocity fresh
    for axis in range(6):
        assert frame[axis].y_o1 == s0[axis]
        assert not frame[axis].y_o1_fresh
        assert frame[axis].y_o2 == moved[6 + axis]


def test_measure_dropout_holds_last_valid():
    cfg = default_config(dropouts=((10.0, 20.0),))
    suite = SensorSuite(cfg, seed=1, dt=1e-3)
    held = None
    for i in range(0, 15_001):
        state = np.full(12, i * 1e-3)
        frame = suite.measure(state, i)
        if i == 9000:
            held = frame[0].y_o1
        if i == 15_000:
            # t = 15 s sits inside the dropout: value from the last update
            # before 10 s, flagged stale.
            assert frame[0].y_o1 == held == 9.0
            assert not frame[0].y_o1_fresh


def test_measure_fresh_flag_schedule():
    cfg = default_config(dropouts=((2.0, 3.0),))
    suite = SensorSuite(cfg, seed=1, dt=1e-3)
    state = np.zeros(12)
    for i in range(0, 5001):
        frame = suite.measure(state, i)
        t = i * 1e-3
        expected = (i % 1000 == 0) and not (2.0 <= t < 3.0)
        if i == 0:
            expected = True
        assert frame[0].y_o1_fresh == expected


def test_measure_large_error_applied_to_position_channel():
    models = tuple(LargeErrorModel(constant=20.0, bound=25.0) if a == 0
                   else LargeErrorModel() for a in range(6))
    suite = SensorSuite(default_config(large_error=models), seed=1, dt=1e-3)
    state = np.zeros(12)
    frame = suite.measure(state, 0)
    assert frame[0].y_o1 == 20.0
    assert frame[1].y_o1 == 0.0
    assert frame[0].y_o2 == 0.0


def test_measure_deterministic():
    cfg = default_config(
        position_noise=tuple(NoiseMixture(0.5, 0.3, 0.02, 3.0) for _ in range(6)),
        velocity_noise=tuple(NoiseMixture(0.001, 0.0005, 0.002, 0.02) for _ in range(6)),
        large_error=tuple(LargeErrorModel(20.0, (), 0.05, 1.0, 25.0) for _ in range(6)),
    )
    a = SensorSuite(cfg, seed=77, dt=1e-3)
    b = SensorSuite(cfg, seed=77, dt=1e-3)
    state = np.linspace(-1, 1, 12)
    for i in range(3000):
        fa = a.measure(state, i)
        fb = b.measure(state, i)
        assert fa == fb


def test_measure_axis_streams_independent():
    # Changing one axis's error model must not perturb the other axes' draws.
    noisy = tuple(NoiseMixture(0.5, 0.0, 0.0, 0.0) for _ in range(6))
    cfg_a = default_config(position_noise=noisy)
    models = (LargeErrorModel(5.0, (), 0.5, 0.001, 9.0),) + tuple(
        LargeErrorModel() for _ in range(5))
    cfg_b = default_config(position_noise=noisy, large_error=models)
    a = SensorSuite(cfg_a, seed=5, dt=1e-3)
    b = SensorSuite(cfg_b, seed=5, dt=1e-3)
    state = np.zeros(12)
    for i in range(5000):
        fa = a.measure(state, i)
        fb = b.measure(state, i)
        for axis in range(1, 6):
            assert fa[axis] == fb[axis]


def test_sensor_config_validation():
    with pytest.raises(ValueError):
        default_config(position_period=0.0)
    with pytest.raises(ValueError):
        default_config(dropouts=((5.0, 4.0),))
    with pytest.raises(ValueError):
        SensorConfig(large_error=(LargeErrorModel(),) * 5)
    with pytest.raises(ValueError):
        SensorSuite(default_config(), seed=1, dt=0.003)  # periods not multiples
    cfg = default_config()
    assert cfg.l_d == (0.0,) * 6
