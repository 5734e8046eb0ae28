# quadlab/controller/cascade.py
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

from pydantic import BaseModel, ConfigDict, Field

from quadlab.controller.pid import PidGains, PidState, pid_step, reset_integral
from quadlab.dynamics.params import VehicleParams
from quadlab.dynamics.state import ControlEfforts
from quadlab.sensors.imu import AttitudeEstimate
from quadlab.sensors.receiver import PilotCommand

log = logging.getLogger(__name__)


class CascadeConfig(BaseModel):
    """
    Angle loop (P) feeding the rate loop (PID) on roll and pitch, a rate PI
    on yaw. PID arithmetic is SI: rad, rad/s in, N m out.
    """

    model_config = ConfigDict(frozen=True)

    angle_gains: PidGains = PidGains(kp=3.604)
    rate_gains: PidGains = PidGains(kp=0.2209, td=0.014)
    yaw_gains: PidGains = PidGains(kp=0.1141, ki=0.634)

    roll_limit_deg: float = Field(45.0, gt=0)
    pitch_limit_deg: float = Field(45.0, gt=0)
    yaw_rate_limit_dps: float = Field(135.0, gt=0)
    loop_rate_hz: float = Field(100.0, gt=0)

    negate_derivative: bool = True
    derivative_filter_tau: float = Field(0.02, ge=0)
    rate_cmd_limit_dps: float = Field(250.0, gt=0)
    torque_limit: float = Field(1.0, gt=0)
    yaw_torque_limit: float = Field(0.5, gt=0)
    takeoff_throttle: float = Field(0.1, ge=0, lt=1)
    gyro_lowpass_alpha: float = Field(0.0, ge=0, lt=1)

    @property
    def sample_time(self) -> float:
        return 1.0 / self.loop_rate_hz


@dataclass(frozen=True)
class CascadePids:
    roll_angle: PidState
    pitch_angle: PidState
    roll_rate: PidState
    pitch_rate: PidState
    yaw_rate: PidState

    @classmethod
    def create(cls, cfg: CascadeConfig) -> "CascadePids":
        ts, tau, neg = cfg.sample_time, cfg.derivative_filter_tau, cfg.negate_derivative
        rate_cmd = math.radians(cfg.rate_cmd_limit_dps)
        angle = PidState(ts, -rate_cmd, rate_cmd, negate_derivative=neg, derivative_tau=tau)
        rate = PidState(ts, -cfg.torque_limit, cfg.torque_limit, negate_derivative=neg, derivative_tau=tau)
        yaw = PidState(ts, -cfg.yaw_torque_limit, cfg.yaw_torque_limit, negate_derivative=neg, derivative_tau=tau)
        return cls(angle, angle, rate, rate, yaw)

    def reset_integrals(self) -> "CascadePids":
        return CascadePids(*(reset_integral(s) for s in (
            self.roll_angle, self.pitch_angle, self.roll_rate, self.pitch_rate, self.yaw_rate,
        )))


@dataclass(frozen=True)
class CascadeResult:
    efforts: ControlEfforts
    pids: CascadePids
    roll_rate_sp: float = 0.0
    pitch_rate_sp: float = 0.0
    passthrough: bool = False


def passthrough_efforts(cfg: CascadeConfig, cmd: PilotCommand, params: VehicleParams) -> ControlEfforts:
    """Kill switch: sticks scale straight onto the torque limits, no feedback."""
    return ControlEfforts(
        cmd.throttle * params.max_thrust,
        cmd.roll_deg / cfg.roll_limit_deg * cfg.torque_limit,
        cmd.pitch_deg / cfg.pitch_limit_deg * cfg.torque_limit,
        cmd.yaw_rate_dps / cfg.yaw_rate_limit_dps * cfg.yaw_torque_limit,
    )


def _clip(value: float, limit: float) -> float:
    return max(-limit, min(limit, value))


def cascade_step(
    cfg: CascadeConfig,
    cmd: PilotCommand,
    est: AttitudeEstimate,
    pids: CascadePids,
    now: float,
    params: VehicleParams,
) -> CascadeResult:
    """
    One frame of the inner/outer loop controller.

    Roll and pitch: angle PID output is the rate PID setpoint. Yaw: rate PID
    only. Throttle maps to U1 = throttle * max_thrust with no altitude loop.
    Below `takeoff_throttle` all integrators are held at zero.
    """
    if cmd.kill:
        return CascadeResult(passthrough_efforts(cfg, cmd, params), pids, passthrough=True)

    if cmd.throttle < cfg.takeoff_throttle:
        pids = pids.reset_integrals()

    roll_sp = math.radians(_clip(cmd.roll_deg, cfg.roll_limit_deg))
    pitch_sp = math.radians(_clip(cmd.pitch_deg, cfg.pitch_limit_deg))
    yaw_sp = math.radians(_clip(cmd.yaw_rate_dps, cfg.yaw_rate_limit_dps))

    p_sp, roll_angle = pid_step(pids.roll_angle, cfg.angle_gains, roll_sp, est.phi, now)
    u2, roll_rate = pid_step(pids.roll_rate, cfg.rate_gains, p_sp, est.p, now)
    q_sp, pitch_angle = pid_step(pids.pitch_angle, cfg.angle_gains, pitch_sp, est.theta, now)
    u3, pitch_rate = pid_step(pids.pitch_rate, cfg.rate_gains, q_sp, est.q, now)
    u4, yaw_rate = pid_step(pids.yaw_rate, cfg.yaw_gains, yaw_sp, est.r, now)

    efforts = ControlEfforts(max(cmd.throttle, 0.0) * params.max_thrust, u2, u3, u4)
    new_pids = replace(
        pids,
        roll_angle=roll_angle, pitch_angle=pitch_angle,
        roll_rate=roll_rate, pitch_rate=pitch_rate, yaw_rate=yaw_rate,
    )
    return CascadeResult(efforts, new_pids, p_sp, q_sp)
