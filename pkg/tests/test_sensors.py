import math

import numpy as np
import pytest
from scipy import signal

from quadlab.common.errors import FreeFall
from quadlab.common.metrics import rise_time
from quadlab.dynamics import BodyState, VehicleParams
from quadlab.sensors import (
    AttitudeEstimator, FilterConfig, ImuEmulator, ImuSample, NoiseConfig, PwmFrame,
    accel_angles, apply_filter, butterworth2_step, complementary_step, imu_traces, pwm_map, pwm_quantize,
    receiver_step_traces, sensor_model,
)
from quadlab.sensors.filters import SMOOTHING_KINDS, dc_gain, design, filter_step
from quadlab.sensors.receiver import stick

P = VehicleParams()
FS = 100.0
DT = 1.0 / FS


# =========================
# IMU
# =========================
def test_noiseless_hover_reads_gravity_only():
    s = sensor_model(BodyState(), P, NoiseConfig.noiseless(), rng_seed=1)
    assert s.accel == pytest.approx([0.0, 0.0, -P.g])
    assert s.gyro == pytest.approx([0.0, 0.0, 0.0])


def test_same_seed_same_stream():
    def stream(seed):
        imu = ImuEmulator(P, NoiseConfig(), seed)
        return [imu.sample(BodyState(p=0.1), k * DT) for k in range(50)]

    assert stream(4) == stream(4)
    assert stream(4) != stream(5)
    assert sensor_model(BodyState(), P, NoiseConfig(), 9) == sensor_model(BodyState(), P, NoiseConfig(), 9)


def test_timestamps_must_increase():
    imu = ImuEmulator(P, NoiseConfig(), 0)
    imu.sample(BodyState(), 0.1)
    with pytest.raises(ValueError):
        imu.sample(BodyState(), 0.1)


def test_gyro_integration_drifts_but_complementary_stays_bounded():
    imu = ImuEmulator(P, NoiseConfig(), 21)
    est = AttitudeEstimator(0.98, DT)
    integrated, worst = 0.0, 0.0
    for k in range(6000):
        s = imu.sample(BodyState(), k * DT)
        integrated += s.gx * DT
        worst = max(worst, abs(est.update(s).phi))
    assert abs(integrated) > 0.1
    assert worst < 0.05


def test_level_accel_gives_zero_angles():
    assert accel_angles(ImuSample(0.0, 0.0, -9.81, 0, 0, 0)) == (0.0, 0.0)


@pytest.mark.parametrize("phi_deg, theta_deg", [(30.0, 0.0), (0.0, 20.0), (-15.0, 10.0)])
def test_static_tilt_recovered(phi_deg, theta_deg):
    state = BodyState(phi=math.radians(phi_deg), theta=math.radians(theta_deg))
    roll, pitch = accel_angles(sensor_model(state, P, NoiseConfig.noiseless(), 0), P.g)
    assert math.degrees(roll) == pytest.approx(phi_deg, abs=1e-9)
    assert math.degrees(pitch) == pytest.approx(theta_deg, abs=1e-9)


def test_free_fall_rejected():
    with pytest.raises(FreeFall):
        accel_angles(ImuSample(0.1, 0.0, -0.2, 0, 0, 0))


def test_estimator_starts_from_accelerometer():
    est = AttitudeEstimator(0.98, DT)
    s = sensor_model(BodyState(phi=0.2), P, NoiseConfig.noiseless(), 0)
    assert est.update(s).phi == pytest.approx(0.2, abs=1e-12)


# =========================
# complementary filter
# =========================
def test_complementary_extremes():
    assert complementary_step(0.3, 2.0, -1.0, 1.0, 0.01) == pytest.approx(0.32)
    assert complementary_step(0.3, 2.0, -1.0, 0.0, 0.01) == -1.0


def test_complementary_converges_geometrically():
    angle = 0.0
    for n in range(1, 101):
        angle = complementary_step(angle, 0.0, 1.0, 0.98, DT)
        assert angle == pytest.approx(1.0 - 0.98 ** n, abs=1e-12)


def test_complementary_identity_random_inputs():
    rng = np.random.default_rng(0)
    for prev, gyro, acc, alpha in rng.uniform(-1, 1, (20, 4)):
        alpha = abs(alpha)
        expected = alpha * (prev + gyro * DT) + (1 - alpha) * acc
        assert complementary_step(prev, gyro, acc, alpha, DT) == pytest.approx(expected, abs=1e-15)


def test_complementary_bias_error_bound():
    bias, alpha = 0.01, 0.98
    angle = 0.0
    for _ in range(2000):
        angle = complementary_step(angle, bias, 0.0, alpha, DT)
    assert angle == pytest.approx(alpha * bias * DT / (1 - alpha), rel=1e-6)


def test_complementary_rejects_bad_alpha():
    with pytest.raises(ValueError):
        complementary_step(0.0, 0.0, 0.0, 1.5, DT)


# =========================
# low-pass family
# =========================
CFG = FilterConfig(cutoff_hz=5.0, sample_rate_hz=FS)


@pytest.mark.parametrize("kind", ["lowpass1", "butterworth2", "bessel2"])
def test_unit_dc_gain(kind):
    assert dc_gain(CFG, kind) == pytest.approx(1.0, abs=1e-12)
    y = apply_filter(np.full(400, 3.5), CFG, kind)
    assert y[-1] == pytest.approx(3.5, abs=1e-6)


def test_chebyshev_dc_gain_sits_at_ripple_floor():
    assert dc_gain(CFG, "chebyshev1") == pytest.approx(10 ** (-1.0 / 20), rel=1e-9)


def test_butterworth_minus_3db_at_cutoff():
    b, a = design(CFG, "butterworth2")
    _, h = signal.freqz(b, a, worN=[5.0], fs=FS)
    assert abs(h[0]) == pytest.approx(1 / math.sqrt(2), abs=1e-9)


def test_butterworth_step_tracks_prewarped_prototype():
    n = 100
    y = apply_filter(np.ones(n), CFG, "butterworth2")
    wa = 2 * FS * math.tan(math.pi * 5.0 / FS)
    proto = signal.lti([wa ** 2], [1.0, math.sqrt(2) * wa, wa ** 2])
    t = np.arange(n + 1) * DT
    u = np.ones(n + 1)
    u[0] = 0.0
    _, y_ref, _ = signal.lsim(proto, u, t)
    assert np.max(np.abs(y - y_ref[1:])) < 0.05


def test_chebyshev_rises_faster_than_butterworth():
    step = np.ones(200)
    step[:10] = 0.0
    t = np.arange(200) * DT
    cheb = rise_time(t, apply_filter(step, CFG, "chebyshev1"))
    butter = rise_time(t, apply_filter(step, CFG, "butterworth2"))
    assert cheb < butter
    assert rise_time(t, step) < butter


@pytest.mark.parametrize("kind", SMOOTHING_KINDS)
def test_filters_are_linear(kind):
    x = np.random.default_rng(2).normal(size=300)
    assert np.allclose(apply_filter(3.0 * x, CFG, kind), 3.0 * apply_filter(x, CFG, kind), atol=1e-9)


def test_streaming_matches_batch():
    x = np.random.default_rng(5).normal(size=200)
    batch = apply_filter(x, CFG, "butterworth2")
    state, out = (), []
    for v in x:
        y, state = butterworth2_step(state, v, CFG)
        out.append(y)
    assert np.allclose(out, batch, atol=1e-12)

    state, out = (), []
    for v in x:
        y, state = filter_step(state, v, CFG.with_kind("chebyshev1"))
        out.append(y)
    assert np.allclose(out, apply_filter(x, CFG, "chebyshev1"), atol=1e-12)


def test_cutoff_must_be_below_nyquist():
    with pytest.raises(ValueError):
        FilterConfig(cutoff_hz=60.0, sample_rate_hz=100.0)


# =========================
# receiver
# =========================
@pytest.mark.parametrize("raw, expected", [(1534.7, 1536), (1024, 1024), (2100, 2048), (900, 1024), (1281.9, 1280)])
def test_pwm_quantize(raw, expected):
    assert pwm_quantize(raw) == expected


def test_quantized_widths_on_grid():
    for w in np.random.default_rng(1).uniform(900, 2200, 500):
        q = pwm_quantize(w)
        assert 1024 <= q <= 2048 and q % 4 == 0


def test_pwm_map_endpoints():
    cmd = pwm_map(PwmFrame(throttle=1024, roll=1536, pitch=2048, yaw=2048))
    assert cmd.roll_deg == 0.0
    assert cmd.pitch_deg == pytest.approx(45.0)
    assert cmd.yaw_rate_dps == pytest.approx(135.0)
    assert cmd.throttle == 0.0
    assert not cmd.trigger and not cmd.kill
    assert pwm_map(PwmFrame(roll=2048)).roll_deg == pytest.approx(45.0)
    assert pwm_map(PwmFrame(trigger=2048, kill=2048)).kill


def test_attitude_map_is_odd():
    for d in range(0, 513, 4):
        assert stick(1536 + d, 45.0) == pytest.approx(-stick(1536 - d, 45.0))


def test_frame_rejects_off_grid_width():
    with pytest.raises(ValueError):
        PwmFrame(roll=1537)


# =========================
# traces
# =========================
def test_imu_traces_columns_and_smoothing():
    frame = imu_traces(P, CFG, NoiseConfig(), seed=3, duration=4.0)
    assert list(frame.columns) == ["t", "truth", "raw", "complementary", *SMOOTHING_KINDS, "configured"]
    assert np.allclose(frame["configured"], frame[CFG.kind])
    assert len(frame) == 400
    noise_raw = np.std(frame["raw"] - frame["truth"])
    noise_comp = np.std(frame["complementary"] - frame["truth"])
    assert noise_comp < noise_raw


def test_receiver_step_trace():
    frame = receiver_step_traces(CFG, step_deg=10.0)
    assert frame["raw"].iloc[0] == 0.0
    assert frame["raw"].iloc[-1] == pytest.approx(112 / 512 * 45)
    assert frame["butterworth2"].iloc[-1] == pytest.approx(frame["raw"].iloc[-1], abs=1e-3)


def test_traces_follow_the_configured_kind():
    cheby = CFG.with_kind("chebyshev1")
    rx = receiver_step_traces(cheby, step_deg=10.0)
    assert np.allclose(rx["configured"], rx["chebyshev1"], atol=1e-12)
    imu = imu_traces(P, CFG.with_kind("complementary"), NoiseConfig(), seed=3, duration=1.0)
    assert imu["configured"].equals(imu["complementary"])
