import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.linalg import expm

from quadlab.common.errors import AttitudeDiverged
from quadlab.common.metrics import settling_time
from quadlab.controller import (
    SCENARIOS, CascadeConfig, CascadePids, ClosedLoopConfig, Direction, Mode, PidGains, PidState,
    attitude_model, build_scenario, cascade_step, closed_loop_simulate, loop_rate_sweep, pid_step,
    reset_integral, set_mode, settling_floors, sweep_dt,
)
from quadlab.controller.closed_loop import CHANNEL_COLUMNS, FLOOR_SIGMAS
from quadlab.dynamics import VehicleParams
from quadlab.logio.flightlog import LOG_COLUMNS
from quadlab.sensors import AttitudeEstimate, FilterConfig, NoiseConfig, PilotCommand, apply_filter

P = VehicleParams()
QUIET = ClosedLoopConfig(noise=NoiseConfig.noiseless())


def _run(state, gains, setpoint, measurements, ts=0.01):
    out = None
    for k, m in enumerate(measurements):
        out, state = pid_step(state, gains, setpoint, m, k * ts)
    return out, state


# =========================
# pid_step
# =========================
def test_proportional_only():
    out, _ = pid_step(PidState(0.01, -10, 10), PidGains(kp=2), 3.0, 0.0, 0.0)
    assert out == pytest.approx(6.0)


def test_integral_sums_ki_e_dt():
    out, st = _run(PidState(0.01, -10, 10), PidGains(ki=0.634), 1.0, [0.0] * 100)
    assert st.integral == pytest.approx(0.634, abs=1e-9)
    assert out == pytest.approx(0.634, abs=1e-9)


def test_integral_clamps_and_resets():
    _, st = _run(PidState(0.01, -1, 1), PidGains(ki=10), 5.0, [0.0] * 200)
    assert st.integral == 1.0
    assert reset_integral(st).integral == 0.0
    assert reset_integral(PidState(0.01)).integral == 0.0


def test_reset_keeps_everything_else():
    _, st = _run(PidState(0.01, -1, 1), PidGains(kp=0.1, ki=1), 0.5, [0.0, 0.1, 0.2])
    cleared = reset_integral(st)
    assert cleared.last_input == st.last_input
    assert cleared.last_output == st.last_output
    assert cleared.last_time == st.last_time


def test_early_call_returns_previous_output():
    gains = PidGains(kp=1.0)
    out1, st1 = pid_step(PidState(0.01, -10, 10), gains, 1.0, 0.0, 0.0)
    out2, st2 = pid_step(st1, gains, 5.0, 0.0, 0.004)
    assert out2 == out1
    assert st2 is st1
    out3, _ = pid_step(st1, gains, 5.0, 0.0, 0.01)
    assert out3 == pytest.approx(5.0)


def test_off_mode_holds_output_and_bumpless_return():
    gains = PidGains(kp=1.0, ki=1.0)
    out, st = pid_step(PidState(0.01, -10, 10), gains, 2.0, 0.0, 0.0)
    off = set_mode(st, Mode.OFF)
    held, same = pid_step(off, gains, 9.0, 0.0, 1.0)
    assert held == out and same is off
    back = set_mode(off, Mode.ACTIVE, measurement=0.0)
    assert back.integral == pytest.approx(out)
    assert back.last_time is None


def test_all_zero_gains_output_zero():
    rng = np.random.default_rng(3)
    st = PidState(0.01, -5, 5, derivative_tau=0.02)
    for k in range(50):
        out, st = pid_step(st, PidGains(), rng.normal(), rng.normal(), k * 0.01)
        assert out == 0.0


@pytest.mark.parametrize("setpoint", [-100.0, -0.3, 0.0, 0.7, 100.0])
def test_output_within_limits(setpoint):
    st = PidState(0.01, -0.5, 2.0)
    gains = PidGains(kp=3.0, ki=5.0, td=0.2)
    for k, m in enumerate(np.linspace(-1, 1, 30)):
        out, st = pid_step(st, gains, setpoint, m, k * 0.01)
        assert -0.5 <= out <= 2.0
        assert -0.5 <= st.integral <= 2.0


def test_reverse_negates_unclamped_output():
    gains = PidGains(kp=1.2, ki=0.5, td=0.1)
    meas = [0.0, 0.05, 0.12]
    direct, _ = _run(PidState(0.01, -100, 100), gains, 1.0, meas)
    reverse, _ = _run(PidState(0.01, -100, 100, direction=Direction.REVERSE), gains, 1.0, meas)
    assert reverse == pytest.approx(-direct)


def test_setpoint_step_has_no_derivative_kick():
    gains = PidGains(td=1.0)
    st = PidState(0.01, -10, 10)
    _, st = pid_step(st, gains, 0.0, 0.0, 0.0)
    out, _ = pid_step(st, gains, 5.0, 0.0, 0.01)
    assert out == 0.0


@pytest.mark.parametrize("negate, expected", [(True, -1.0), (False, 1.0)])
def test_derivative_sign_switch(negate, expected):
    gains = PidGains(td=1.0)
    st = PidState(0.01, -10, 10, negate_derivative=negate)
    _, st = pid_step(st, gains, 0.0, 0.0, 0.0)
    out, _ = pid_step(st, gains, 0.0, 0.01, 0.01)
    assert out == pytest.approx(expected)


def test_pid_state_rejects_bad_limits():
    with pytest.raises(ValueError):
        PidState(0.01, 1.0, -1.0)
    with pytest.raises(ValueError):
        PidState(0.0)


# =========================
# cascade
# =========================
CFG = CascadeConfig()


def test_zero_error_zero_torques():
    res = cascade_step(CFG, PilotCommand(throttle=0.25), AttitudeEstimate(), CascadePids.create(CFG), 0.0, P)
    assert (res.efforts.u2, res.efforts.u3, res.efforts.u4) == (0.0, 0.0, 0.0)
    assert res.efforts.u1 == pytest.approx(0.25 * P.max_thrust)
    assert res.efforts.u1 == pytest.approx(P.mass * P.g)


def test_ten_degree_roll_error_two_stage_gain():
    res = cascade_step(CFG, PilotCommand(roll_deg=10.0, throttle=0.25), AttitudeEstimate(),
                       CascadePids.create(CFG), 0.0, P)
    assert math.degrees(res.roll_rate_sp) == pytest.approx(36.04, rel=1e-9)
    assert res.efforts.u2 == pytest.approx(0.2209 * res.roll_rate_sp, rel=1e-9)
    assert res.efforts.u3 == 0.0


def test_angle_output_limited_to_rate_command_limit():
    res = cascade_step(CFG, PilotCommand(roll_deg=45.0, throttle=0.25), AttitudeEstimate(phi=-1.0),
                       CascadePids.create(CFG), 0.0, P)
    assert res.roll_rate_sp == pytest.approx(math.radians(250.0))
    assert abs(res.efforts.u2) <= CFG.torque_limit


def test_kill_switch_passes_sticks_through():
    pids = CascadePids.create(CFG)
    cmd = PilotCommand(roll_deg=9.0, pitch_deg=-4.5, yaw_rate_dps=27.0, throttle=0.3, kill=True)
    res = cascade_step(CFG, cmd, AttitudeEstimate(phi=0.4), pids, 0.0, P)
    assert res.passthrough
    assert res.pids is pids
    assert res.efforts.u2 == pytest.approx(0.2)
    assert res.efforts.u3 == pytest.approx(-0.1)
    assert res.efforts.u4 == pytest.approx(0.1)
    assert res.efforts.u1 == pytest.approx(0.3 * P.max_thrust)


def test_integrals_reset_below_takeoff_throttle():
    pids = CascadePids.create(CFG)
    pids = replace(pids, yaw_rate=replace(pids.yaw_rate, integral=0.3))
    res = cascade_step(CFG, PilotCommand(throttle=0.05), AttitudeEstimate(), pids, 0.0, P)
    assert res.pids.yaw_rate.integral == 0.0
    assert res.efforts.u4 == 0.0

    res = cascade_step(CFG, PilotCommand(throttle=0.5), AttitudeEstimate(), pids, 0.0, P)
    assert res.pids.yaw_rate.integral == pytest.approx(0.3)


# =========================
# closed-loop attitude model
# =========================
def test_attitude_loop_poles_are_stable():
    model = attitude_model(CFG, P)
    assert model.is_stable()
    assert np.all(np.real(model.poles()) < 0)
    assert "roll_filt" in model.state_names
    assert "yaw_int" in model.state_names


@pytest.mark.parametrize("ref, out", [("roll_ref", "phi"), ("pitch_ref", "theta"), ("yaw_rate_ref", "r")])
def test_attitude_loop_unit_dc_gain(ref, out):
    h = attitude_model(CFG, P).frequency_response(1e-5, ref, out, zoh_delay=False)
    assert abs(h[0]) == pytest.approx(1.0, abs=1e-3)


def test_attitude_model_needs_filter_with_derivative():
    with pytest.raises(ValueError):
        attitude_model(CFG.model_copy(update={"derivative_filter_tau": 0.0}), P)


def test_attitude_loop_response_matches_resolvent_in_caller_order():
    model = attitude_model(CFG, P)
    w = np.array([5.0, 0.5, 2.0])
    h = model.frequency_response(w, "pitch_ref", "theta")
    for k, wk in enumerate(w):
        x = np.linalg.solve(1j * wk * np.eye(model.a.shape[0]) - model.a, model.b[:, 1])
        expected = (model.c[1] @ x) * np.exp(-1j * wk * model.sample_time / 2.0)
        assert h[k] == pytest.approx(expected, rel=1e-8)


def test_attitude_loop_kick_decays_like_matrix_exponential():
    model = attitude_model(CFG, P)
    frame = model.initial_response({"p": 0.5}, 0.01, 3.0)
    assert frame["p"].iloc[0] == 0.5
    assert list(frame.columns) == ["t", *model.state_names]
    x0 = np.zeros(model.a.shape[0])
    x0[model.state_names.index("p")] = 0.5
    np.testing.assert_allclose(frame.drop(columns="t").iloc[-1].to_numpy(), expm(model.a * 3.0) @ x0, atol=1e-9)
    assert abs(frame["phi"].iloc[-1]) < 1e-4


# =========================
# closed loop
# =========================
def test_scenario_lookup_lists_names():
    with pytest.raises(ValueError, match="impulse-roll"):
        build_scenario("barrel-roll", QUIET)
    assert {"hover", "open-loop-perturb", "chirp-yaw", "doublet-pitch"} <= set(SCENARIOS)


def test_sweep_dt_divides_period():
    assert sweep_dt(100) == pytest.approx(0.01)
    assert sweep_dt(20) == pytest.approx(0.01)
    assert sweep_dt(1000) == pytest.approx(0.001)
    assert sweep_dt(30) == pytest.approx((1 / 30) / 4)


def test_hover_holds_trim_and_logs_every_frame():
    res = closed_loop_simulate("nonlinear", QUIET, "hover", 0.01, 2.0)
    assert len(res.log) == 200
    assert list(res.log.columns) == list(LOG_COLUMNS)
    assert len(res.trajectory) == 201
    assert np.max(np.abs(res.trajectory[["phi", "theta", "p", "q", "r"]].to_numpy())) < 1e-9
    assert (res.log["pwm1"] == 1280).all()
    assert res.saturation_events == 0


@pytest.mark.parametrize("axis, column", [("roll", "phi"), ("pitch", "theta"), ("yaw", "r")])
def test_linear_impulse_settles_within_a_second(axis, column):
    res = closed_loop_simulate("linear", QUIET, f"impulse-{axis}")
    assert res.settling[axis] <= 1.0
    assert abs(res.trajectory[column].iloc[-1]) < 1e-3


def test_nonlinear_initial_roll_settles():
    res = closed_loop_simulate("nonlinear", QUIET, "initial-roll-5deg")
    assert res.settling["roll"] < 1.5
    assert res.summary()["scenario"] == "initial-roll-5deg"


def test_open_loop_perturbation_diverges():
    with pytest.raises(AttitudeDiverged) as info:
        closed_loop_simulate("nonlinear", QUIET, "open-loop-perturb")
    assert info.value.time < 10.0
    assert info.value.trajectory is not None
    assert len(info.value.trajectory) > 1


def test_closed_loop_is_deterministic():
    a = closed_loop_simulate("nonlinear", ClosedLoopConfig(seed=11), "impulse-pitch", 0.01, 1.0)
    b = closed_loop_simulate("nonlinear", ClosedLoopConfig(seed=11), "impulse-pitch", 0.01, 1.0)
    assert a.trajectory.equals(b.trajectory)
    assert a.log.equals(b.log)


def test_settling_band_has_an_absolute_floor():
    t = np.arange(0.0, 2.0, 0.01)
    chatter = 0.05 * np.where(np.arange(t.size) % 2, 1.0, -1.0)
    y = np.exp(-t / 0.1) + chatter
    assert settling_time(t, y) == math.inf
    assert 0.4 < settling_time(t, y, floor=0.06) < 0.5
    assert settling_time(t, np.full(t.size, 0.01), floor=0.05) == 0.0


def test_noise_floor_vanishes_without_noise():
    assert settling_floors(QUIET, 5.0) == {"roll": 0.0, "pitch": 0.0, "yaw": 0.0}


def test_noise_floor_from_accelerometer_noise():
    cfg = ClosedLoopConfig(noise=NoiseConfig(accel_noise=0.3, gyro_noise=0.0, gyro_bias=0.0, gyro_drift=0.0))
    floors = settling_floors(cfg, 5.0)
    assert floors["roll"] == pytest.approx(FLOOR_SIGMAS * 0.3 / 9.81 * math.sqrt(0.02 / 1.98))
    assert floors["yaw"] == 0.0


def test_impulse_settles_within_a_second_with_default_noise():
    res = closed_loop_simulate("nonlinear", ClosedLoopConfig(), "impulse-roll")
    assert res.settling["roll"] < 1.0
    assert res.summary()["settling_floor"]["roll"] > 0.0


def test_twenty_hertz_without_derivative_filter_fails_to_settle():
    unfiltered = QUIET.cascade.model_copy(update={"derivative_filter_tau": 0.0})
    cfg = replace(QUIET, cascade=unfiltered).with_loop_rate(20.0)
    try:
        res = closed_loop_simulate("nonlinear", cfg, "impulse-roll", sweep_dt(20.0))
    except AttitudeDiverged as e:
        assert e.time <= 5.0
        return
    nominal = closed_loop_simulate("nonlinear", QUIET, "impulse-roll").settling["roll"]
    assert res.settling["roll"] > 3 * nominal


def test_configured_filters_run_alongside_the_loop():
    rx = FilterConfig(kind="lowpass1", cutoff_hz=2.0)
    cfg = replace(QUIET, receiver_filter=rx, imu_filter=FilterConfig(kind="complementary"))
    res = closed_loop_simulate("linear", cfg, "doublet-roll", 0.01, 4.0)
    ch = res.channels
    assert list(ch.columns) == list(CHANNEL_COLUMNS)
    assert len(ch) == 400
    assert np.allclose(ch["roll_cmd"], res.log["cmd_roll"])
    assert np.allclose(ch["roll_cmd_filt"], apply_filter(ch["roll_cmd"], rx), atol=1e-9)
    assert ch["roll_cmd_filt"].abs().max() < ch["roll_cmd"].abs().max()
    assert np.allclose(ch["phi_acc_filt"], res.log["phi"])
    # smoothing is observed only; the flight is the same as with the default filters
    plain = closed_loop_simulate("linear", QUIET, "doublet-roll", 0.01, 4.0)
    assert res.trajectory.equals(plain.trajectory)


def test_loop_period_must_be_multiple_of_dt():
    with pytest.raises(ValueError):
        closed_loop_simulate("linear", QUIET, "hover", 0.003, 1.0)


def test_unknown_plant():
    with pytest.raises(ValueError, match="linear"):
        closed_loop_simulate("quantum", QUIET, "hover", 0.01, 1.0)


@pytest.mark.slow
def test_loop_rate_sweep_degrades_at_low_rate():
    table = loop_rate_sweep(QUIET, [20.0, 100.0, 1000.0]).set_index("rate_hz")
    nominal = table.loc[100.0, "settling_s"]
    assert table.loc[100.0, "stable"]
    slow = table.loc[20.0]
    assert (not slow["stable"]) or slow["settling_s"] > 3 * nominal
    assert table.loc[1000.0, "stable"]
    assert table.loc[1000.0, "settling_s"] == pytest.approx(nominal, rel=0.3)
