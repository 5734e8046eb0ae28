# quadlab/sensors/receiver.py
from __future__ import annotations

from dataclasses import astuple, dataclass

import numpy as np

PWM_MIN = 1024
PWM_MAX = 2048
PWM_MID = 1536
PWM_STEP = 4
PWM_HALF_SPAN = (PWM_MAX - PWM_MIN) / 2

CHANNELS = ("throttle", "roll", "pitch", "yaw", "trigger", "kill")


def pwm_quantize(width_us: float) -> int:
    """Clamp a raw pulse width to [1024, 2048] us and round to the 4 us receiver resolution."""
    w = min(max(float(width_us), PWM_MIN), PWM_MAX)
    return int(PWM_STEP * np.rint(w / PWM_STEP))


@dataclass(frozen=True)
class PwmFrame:
    """Six receiver channels in microseconds: throttle, roll, pitch, yaw, trigger, kill."""

    throttle: int = PWM_MIN
    roll: int = PWM_MID
    pitch: int = PWM_MID
    yaw: int = PWM_MID
    trigger: int = PWM_MIN
    kill: int = PWM_MIN

    def __post_init__(self):
        for name, w in zip(CHANNELS, astuple(self)):
            if not (PWM_MIN <= w <= PWM_MAX) or w % PWM_STEP:
                raise ValueError(f"channel {name}: {w} us is not a quantized width in [{PWM_MIN}, {PWM_MAX}]")

    @classmethod
    def from_raw(cls, *widths: float) -> "PwmFrame":
        return cls(*(pwm_quantize(w) for w in widths))

    def to_tuple(self) -> tuple[int, ...]:
        return astuple(self)


@dataclass(frozen=True)
class PilotCommand:
    """Mapped stick positions: degrees, deg/s and a 0..1 throttle fraction."""

    roll_deg: float = 0.0
    pitch_deg: float = 0.0
    yaw_rate_dps: float = 0.0
    throttle: float = 0.0
    trigger: bool = False
    kill: bool = False


def stick(width: float, limit: float) -> float:
    return (width - PWM_MID) / PWM_HALF_SPAN * limit


def stick_to_width(value: float, limit: float) -> float:
    """Inverse of the attitude-channel map, before quantization."""
    return PWM_MID + value / limit * PWM_HALF_SPAN


def pwm_map(
    frame: PwmFrame,
    roll_limit_deg: float = 45.0,
    pitch_limit_deg: float = 45.0,
    yaw_rate_limit_dps: float = 135.0,
) -> PilotCommand:
    return PilotCommand(
        roll_deg=stick(frame.roll, roll_limit_deg),
        pitch_deg=stick(frame.pitch, pitch_limit_deg),
        yaw_rate_dps=stick(frame.yaw, yaw_rate_limit_dps),
        throttle=(frame.throttle - PWM_MIN) / (PWM_MAX - PWM_MIN),
        trigger=frame.trigger > PWM_MID,
        kill=frame.kill > PWM_MID,
    )
