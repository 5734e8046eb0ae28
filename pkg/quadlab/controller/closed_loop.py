# quadlab/controller/closed_loop.py
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np
import pandas as pd

from quadlab.common.errors import AttitudeDiverged, SingularAttitude
from quadlab.common.metrics import settling_time
from quadlab.controller.cascade import CascadeConfig, CascadePids, cascade_step
from quadlab.controller.scenarios import Scenario, build_scenario
from quadlab.dynamics.eom import hover_trim, state_derivative
from quadlab.dynamics.integrate import crashed, rk4_step
from quadlab.dynamics.mixing import mix_motors, unmix_clamped
from quadlab.dynamics.params import VehicleParams
from quadlab.dynamics.state import STATE_NAMES, BodyState, MotorSpeeds
from quadlab.excitation.chirp import ChirpSpec
from quadlab.linearization.jacobian import linear_derivative, linearize_at
from quadlab.logio.flightlog import LOG_COLUMNS
from quadlab.sensors.filters import FilterConfig, filter_step, initial_state
from quadlab.sensors.imu import AttitudeEstimator, ImuEmulator, NoiseConfig, accel_angles
from quadlab.sensors.receiver import PWM_MIN, PilotCommand, PwmFrame, pwm_map, stick_to_width

log = logging.getLogger(__name__)

Plant = Literal["nonlinear", "linear"]
SETTLING_SIGNAL = {"roll": "phi", "pitch": "theta", "yaw": "r"}
# width of the settling noise floor in standard deviations of the attitude estimate jitter
FLOOR_SIGMAS = 4.0
CHANNEL_COLUMNS = (
    "t", "roll_cmd", "pitch_cmd", "yaw_rate_cmd", "roll_cmd_filt", "pitch_cmd_filt", "yaw_rate_cmd_filt",
    "phi_acc", "theta_acc", "phi_acc_filt", "theta_acc_filt",
)


@dataclass(frozen=True)
class ClosedLoopConfig:
    """Everything a closed-loop run needs besides the scenario."""

    params: VehicleParams = field(default_factory=VehicleParams)
    cascade: CascadeConfig = field(default_factory=CascadeConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    chirp: ChirpSpec = field(default_factory=ChirpSpec)
    imu_filter: FilterConfig = field(default_factory=FilterConfig)
    receiver_filter: FilterConfig = field(default_factory=FilterConfig)
    filter_alpha: float = 0.98
    excitation_fraction: float = 0.1
    seed: int = 7
    max_samples: int = 2_000_000

    def with_loop_rate(self, rate_hz: float) -> "ClosedLoopConfig":
        return replace(self, cascade=self.cascade.model_copy(update={"loop_rate_hz": float(rate_hz)}))


@dataclass(frozen=True, eq=False)
class ClosedLoopResult:
    scenario: str
    trajectory: pd.DataFrame
    log: pd.DataFrame
    settling: dict[str, float]
    saturation_events: int
    channels: pd.DataFrame | None = None
    settling_floor: dict[str, float] = field(default_factory=dict)

    def summary(self) -> dict:
        last = self.trajectory.iloc[-1]
        return {
            "scenario": self.scenario,
            "duration_s": float(last["t"]),
            "settling_s": dict(self.settling),
            "settling_floor": dict(self.settling_floor),
            "saturation_events": self.saturation_events,
            "final_attitude_deg": {k: math.degrees(float(last[k])) for k in ("phi", "theta", "psi")},
        }


def _pilot_frame(cfg: ClosedLoopConfig, throttle: float, trigger: bool, kill: bool) -> PwmFrame:
    """Sticks centred at the given throttle; quantized like a real receiver."""
    c = cfg.cascade
    return PwmFrame.from_raw(
        PWM_MIN + throttle * 1024,
        stick_to_width(0.0, c.roll_limit_deg),
        stick_to_width(0.0, c.pitch_limit_deg),
        stick_to_width(0.0, c.yaw_rate_limit_dps),
        2048 if trigger else PWM_MIN,
        2048 if kill else PWM_MIN,
    )


def _inject(cmd: PilotCommand, axis: str | None, value: float) -> PilotCommand:
    if axis is None or value == 0.0:
        return cmd
    name = {"roll": "roll_deg", "pitch": "pitch_deg", "yaw": "yaw_rate_dps"}[axis]
    return replace(cmd, **{name: getattr(cmd, name) + value})


def _steps_per_frame(loop_rate_hz: float, dt: float) -> int:
    period = 1.0 / loop_rate_hz
    n = int(round(period / dt))
    if n < 1 or abs(n * dt - period) > 1e-9 * max(period, 1.0):
        raise ValueError(f"loop period {period} s is not an integer multiple of dt={dt} s")
    return n


def _motor_us(omega: float, params: VehicleParams) -> float:
    return PWM_MIN + 1024.0 * omega / params.omega_max


def settling_floors(cfg: ClosedLoopConfig, duration: float) -> dict[str, float]:
    """
    Smallest settling band (rad for roll/pitch, rad/s for yaw) that the
    configured IMU noise lets the loop hold; all zero for a noiseless IMU.

    Roll/pitch: the gyro bias shifts the complementary estimate by
    alpha ts b / (1 - alpha) and the angle loop holds a further b / kp to
    cancel the biased rate, plus FLOOR_SIGMAS of the estimate jitter from
    accelerometer and gyro white noise. Yaw: the integrator zeroes the
    measured rate, so the true rate keeps the bias, plus one gyro sigma.
    The bias includes its random walk over the run.
    """
    n, a = cfg.noise, cfg.filter_alpha
    ts, g = cfg.cascade.sample_time, cfg.params.g
    bias = abs(n.gyro_bias) + 3.0 * n.gyro_drift * math.sqrt(duration)
    kp = cfg.cascade.angle_gains.kp
    if a < 1.0:
        est_offset = bias * a * ts / (1.0 - a)
        gyro_sigma = n.gyro_noise * ts / math.sqrt(1.0 - a * a)
    else:
        est_offset = bias * duration
        gyro_sigma = n.gyro_noise * math.sqrt(ts * duration)
    accel_sigma = n.accel_noise / g * math.sqrt((1.0 - a) / (1.0 + a))
    angle = est_offset + (bias / kp if kp > 0 else 0.0) + FLOOR_SIGMAS * math.hypot(accel_sigma, gyro_sigma)
    return {"roll": angle, "pitch": angle, "yaw": bias + n.gyro_noise}


def _streaming(fcfg: FilterConfig, rate_hz: float) -> FilterConfig | None:
    """Filter config re-rated to the loop; None for the complementary kind or a cutoff above Nyquist."""
    if fcfg.kind == "complementary":
        return None
    try:
        return FilterConfig(**{**fcfg.model_dump(), "sample_rate_hz": rate_hz})
    except ValueError:
        log.warning("%s cutoff %.3g Hz is above Nyquist at %.3g Hz; channel left unfiltered",
                    fcfg.kind, fcfg.cutoff_hz, rate_hz)
        return None


def _smooth(fcfg: FilterConfig | None, state: tuple[float, ...] | None, x: float):
    if fcfg is None:
        return x, state
    if state is None:
        state = initial_state(fcfg, x)
    return filter_step(state, x, fcfg)


def closed_loop_simulate(
    plant: Plant,
    cfg: ClosedLoopConfig,
    scenario: Scenario | str,
    dt: float = 0.01,
    duration: float | None = None,
) -> ClosedLoopResult:
    """
    Fly a scenario under the cascade controller.

    Per control frame: IMU sample, complementary filter, receiver PWM
    quantize and map, excitation injection, cascade, unmix with clamping,
    then the rotor speeds are held over round(1/(loop_rate dt)) plant steps.
    The configured receiver and IMU smoothing filters run alongside on the
    stick commands and accelerometer angles; `channels` records them and
    nothing feeds back into the loop.
    The linear plant is xdot = A (x - x*) + B (U - U*) about hover.

    Raises:
        AttitudeDiverged: roll or pitch past 89 deg, partial trajectory attached.
    """
    if isinstance(scenario, str):
        scenario = build_scenario(scenario, cfg)
    duration = scenario.duration if duration is None else duration
    params, casc = cfg.params, cfg.cascade
    n_sub = _steps_per_frame(casc.loop_rate_hz, dt)
    ts = casc.sample_time
    n_frames = int(round(duration / ts))
    if n_frames * n_sub > cfg.max_samples:
        raise ValueError(f"{n_frames * n_sub} plant samples exceed max_samples={cfg.max_samples}")

    if plant == "linear":
        model = linearize_at(BodyState(), hover_trim(params)[1], params)
        deriv = lambda x, e: linear_derivative(model, x, e.to_array())
    elif plant == "nonlinear":
        deriv = lambda x, e: state_derivative(x, (e.u1, e.u2, e.u3, e.u4), e.omega_res, params)
    else:
        raise ValueError(f"unknown plant '{plant}'; valid: linear, nonlinear")

    imu = ImuEmulator(params, cfg.noise, cfg.seed)
    estimator = AttitudeEstimator(cfg.filter_alpha, ts, casc.gyro_lowpass_alpha, params.g)
    pids = CascadePids.create(casc)
    thrust_scale = np.sqrt(np.asarray(scenario.thrust_scale, dtype=float))
    rx_filter = _streaming(cfg.receiver_filter, casc.loop_rate_hz)
    imu_filter = _streaming(cfg.imu_filter, casc.loop_rate_hz)
    rx_states: list[tuple[float, ...] | None] = [None, None, None]
    acc_states: list[tuple[float, ...] | None] = [None, None]
    channel_rows = []

    x = scenario.initial.to_array()
    traj_rows = [(0.0, *x)]
    log_rows = []
    saturation_events = 0

    def partial() -> pd.DataFrame:
        return pd.DataFrame(traj_rows, columns=["t", *STATE_NAMES])

    for k in range(n_frames):
        t = k * ts
        state = BodyState.from_array(x)
        sample = imu.sample(state, t)
        est = estimator.update(sample)

        trigger = t >= scenario.trigger_time - 1e-9
        frame = _pilot_frame(cfg, params.hover_throttle, trigger, scenario.kill)
        cmd = pwm_map(frame, casc.roll_limit_deg, casc.pitch_limit_deg, casc.yaw_rate_limit_dps)
        cmd = _inject(cmd, scenario.axis, scenario.excitation_at(t, ts) if cmd.trigger else 0.0)

        # smoothed receiver and accelerometer channels are recorded, the cascade still flies on cmd and est
        rx = (cmd.roll_deg, cmd.pitch_deg, cmd.yaw_rate_dps)
        rx_filt = []
        for i, v in enumerate(rx):
            y, rx_states[i] = _smooth(rx_filter, rx_states[i], v)
            rx_filt.append(y)
        acc = [math.degrees(v) for v in accel_angles(sample, params.g)]
        if cfg.imu_filter.kind == "complementary":
            acc_filt = [math.degrees(est.phi), math.degrees(est.theta)]
        else:
            acc_filt = []
            for i, v in enumerate(acc):
                y, acc_states[i] = _smooth(imu_filter, acc_states[i], v)
                acc_filt.append(y)
        channel_rows.append((t, *rx, *rx_filt, *acc, *acc_filt))

        result = cascade_step(casc, cmd, est, pids, t, params)
        pids = result.pids
        speeds, saturated = unmix_clamped(result.efforts, params)
        if saturated:
            saturation_events += 1
            if saturation_events == 1:
                log.warning("motor saturation at t=%.2f s (%s)", t, scenario.name)
        speeds = MotorSpeeds(*(speeds.to_array() * thrust_scale))
        applied = mix_motors(speeds, params)

        log_rows.append((
            t, *frame.to_tuple(),
            cmd.roll_deg, cmd.pitch_deg, cmd.yaw_rate_dps, cmd.throttle,
            math.degrees(est.phi), math.degrees(est.theta),
            math.degrees(est.p), math.degrees(est.q), math.degrees(est.r),
            sample.ax, sample.ay, sample.az,
            *(_motor_us(o, params) for o in speeds.to_array()),
            applied.u1, applied.u2, applied.u3, applied.u4,
            int(cmd.trigger), int(cmd.kill),
        ))

        for j in range(n_sub):
            t_next = t + (j + 1) * dt
            try:
                x = rk4_step(lambda s: deriv(s, applied), x, dt)
                angle = crashed(x)
            except SingularAttitude:
                angle = 90.0
            if angle is not None or not np.all(np.isfinite(x)):
                log.warning("%s diverged at t=%.3f s", scenario.name, t_next)
                raise AttitudeDiverged(t_next, angle if angle is not None else math.inf, partial())
            traj_rows.append((t_next, *x))

    trajectory = partial()
    floors = settling_floors(cfg, duration)
    settling = {
        axis: settling_time(trajectory["t"], trajectory[col], floor=floors[axis])
        for axis, col in SETTLING_SIGNAL.items()
    }
    result = ClosedLoopResult(scenario.name, trajectory, pd.DataFrame(log_rows, columns=list(LOG_COLUMNS)),
                              settling, saturation_events,
                              pd.DataFrame(channel_rows, columns=list(CHANNEL_COLUMNS)), floors)
    log.info("%s (%s plant, %.0f Hz): settling %s", scenario.name, plant, casc.loop_rate_hz,
             {k: round(v, 3) for k, v in settling.items()})
    return result


def sweep_dt(rate_hz: float, max_dt: float = 0.01) -> float:
    """Largest plant step <= max_dt that divides the loop period."""
    period = 1.0 / rate_hz
    return period / math.ceil(period / max_dt - 1e-9)


def loop_rate_sweep(
    cfg: ClosedLoopConfig,
    rates,
    scenario: str = "impulse-roll",
    plant: Plant = "nonlinear",
    duration: float = 5.0,
) -> pd.DataFrame:
    """
    Rerun one scenario at each loop rate. A rate is stable when the run
    neither diverges nor fails to settle.
    """
    rows = []
    for rate in rates:
        if rate <= 0:
            raise ValueError(f"loop rates must be positive, got {rate}")
        run_cfg = cfg.with_loop_rate(rate)
        try:
            res = closed_loop_simulate(plant, run_cfg, scenario, sweep_dt(rate), duration)
        except AttitudeDiverged as e:
            rows.append({"rate_hz": float(rate), "stable": False, "settling_s": math.inf, "diverged_at_s": e.time})
            continue
        axis = build_scenario(scenario, run_cfg).axis or "roll"
        ts = res.settling[axis]
        rows.append({"rate_hz": float(rate), "stable": math.isfinite(ts), "settling_s": ts, "diverged_at_s": math.nan})
    return pd.DataFrame(rows, columns=["rate_hz", "stable", "settling_s", "diverged_at_s"])
