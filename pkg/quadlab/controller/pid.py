# quadlab/controller/pid.py
"""
Discrete PID with fixed sample time, derivative on measurement and
integral clamping, stepped functionally: pid_step returns the new state.

Two changes from the stock library form:
- the derivative term sign is configurable (`negate_derivative`, on by
  default), and
- the integral accumulator can be reset explicitly (reset_integral), which
  the cascade does before takeoff.

An optional first-order filter (time constant `derivative_tau`) smooths the
measurement derivative; tau = 0 gives the plain backward difference.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

# allowance for float jitter in "now - last_time >= sample_time"
_TIME_EPS = 1e-9


class Direction(str, Enum):
    DIRECT = "direct"
    REVERSE = "reverse"


class Mode(str, Enum):
    ACTIVE = "active"
    OFF = "off"


class PidGains(BaseModel):
    """Proportional, integral and derivative gains. Any sign is allowed."""

    model_config = ConfigDict(frozen=True)

    kp: float = Field(0.0, allow_inf_nan=False)
    ki: float = Field(0.0, allow_inf_nan=False)
    td: float = Field(0.0, allow_inf_nan=False)


@dataclass(frozen=True)
class PidState:
    sample_time: float
    out_min: float = -1.0
    out_max: float = 1.0
    direction: Direction = Direction.DIRECT
    mode: Mode = Mode.ACTIVE
    negate_derivative: bool = True
    derivative_tau: float = 0.0
    integral: float = 0.0
    last_input: float | None = None
    last_output: float = 0.0
    last_time: float | None = None
    d_filtered: float = 0.0

    def __post_init__(self):
        if not self.sample_time > 0:
            raise ValueError(f"sample_time must be > 0, got {self.sample_time}")
        if not self.out_min < self.out_max:
            raise ValueError(f"output limits must satisfy min < max, got ({self.out_min}, {self.out_max})")
        if self.derivative_tau < 0:
            raise ValueError("derivative_tau must be >= 0")
        if not self.out_min <= self.integral <= self.out_max:
            object.__setattr__(self, "integral", min(max(self.integral, self.out_min), self.out_max))


def _clamp(value: float, lo: float, hi: float) -> float:
    return float(np.clip(value, lo, hi))


def pid_step(state: PidState, gains: PidGains, setpoint: float, measurement: float, now: float) -> tuple[float, PidState]:
    """
    One controller update.

    Calls closer than one sample time to the previous update, and any call
    while the mode is OFF, return the previous output unchanged.

    Example:
        out, st = pid_step(PidState(0.01, -10, 10), PidGains(kp=2), 3.0, 0.0, 0.0)  # out == 6
    """
    if state.mode is Mode.OFF:
        return state.last_output, state
    if state.last_time is not None and now - state.last_time < state.sample_time - _TIME_EPS:
        return state.last_output, state

    ts = state.sample_time
    sign = -1.0 if state.direction is Direction.REVERSE else 1.0
    kp, ki, td = sign * gains.kp, sign * gains.ki, sign * gains.td

    error = setpoint - measurement
    integral = _clamp(state.integral + ki * error * ts, state.out_min, state.out_max)

    last_input = measurement if state.last_input is None else state.last_input
    d_raw = (measurement - last_input) / ts
    if state.derivative_tau > 0:
        beta = math.exp(-ts / state.derivative_tau)
        d_filtered = beta * state.d_filtered + (1.0 - beta) * d_raw
    else:
        d_filtered = d_raw
    d_term = td * d_filtered
    raw = kp * error + integral + (-d_term if state.negate_derivative else d_term)
    output = _clamp(raw, state.out_min, state.out_max)

    return output, replace(
        state,
        integral=integral,
        last_input=float(measurement),
        last_output=output,
        last_time=float(now),
        d_filtered=d_filtered,
    )


def reset_integral(state: PidState) -> PidState:
    return replace(state, integral=0.0)


def set_mode(state: PidState, mode: Mode, measurement: float | None = None) -> PidState:
    """
    Switch mode. Going OFF -> ACTIVE re-initializes bumplessly: the integral
    takes the last output and the derivative history restarts at
    `measurement`.
    """
    if mode is state.mode:
        return state
    if mode is Mode.ACTIVE:
        return replace(
            state,
            mode=mode,
            integral=_clamp(state.last_output, state.out_min, state.out_max),
            last_input=measurement,
            d_filtered=0.0,
            last_time=None,
        )
    return replace(state, mode=mode)
