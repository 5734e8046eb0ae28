# quadlab/sensors/imu.py
from __future__ import annotations

import logging
import math
from dataclasses import astuple, dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from quadlab.common.errors import FreeFall
from quadlab.dynamics.params import VehicleParams
from quadlab.dynamics.state import BodyState

log = logging.getLogger(__name__)

FREE_FALL_FRACTION = 0.1


class NoiseConfig(BaseModel):
    """
    IMU error model. Gyro bias starts at `gyro_bias` on every axis and then
    random-walks with intensity `gyro_drift` (rad/s per sqrt(s)).
    """

    model_config = ConfigDict(frozen=True)

    accel_noise: float = Field(0.3, ge=0, description="m/s^2, 1 sigma")
    gyro_noise: float = Field(0.02, ge=0, description="rad/s, 1 sigma")
    gyro_bias: float = Field(0.005, description="rad/s")
    gyro_drift: float = Field(1e-4, ge=0, description="rad/s/sqrt(s)")

    @classmethod
    def noiseless(cls) -> "NoiseConfig":
        return cls(accel_noise=0.0, gyro_noise=0.0, gyro_bias=0.0, gyro_drift=0.0)


@dataclass(frozen=True)
class ImuSample:
    ax: float
    ay: float
    az: float
    gx: float
    gy: float
    gz: float
    timestamp: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in astuple(self)):
            raise ValueError(f"non-finite IMU sample {self}")

    @property
    def accel(self) -> np.ndarray:
        return np.array([self.ax, self.ay, self.az])

    @property
    def gyro(self) -> np.ndarray:
        return np.array([self.gx, self.gy, self.gz])


def specific_force(state: BodyState, params: VehicleParams) -> np.ndarray:
    """Quasi-static accelerometer reading: gravity resolved in body axes, (0, 0, -g) level."""
    g = params.g
    ct = math.cos(state.theta)
    return np.array([
        g * math.sin(state.theta),
        -g * ct * math.sin(state.phi),
        -g * ct * math.cos(state.phi),
    ])


def _draw(true_state: BodyState, params: VehicleParams, noise: NoiseConfig,
          rng: np.random.Generator, bias: np.ndarray, t: float) -> ImuSample:
    accel = specific_force(true_state, params) + noise.accel_noise * rng.standard_normal(3)
    rates = np.array([true_state.p, true_state.q, true_state.r])
    gyro = rates + bias + noise.gyro_noise * rng.standard_normal(3)
    return ImuSample(*(float(v) for v in accel), *(float(v) for v in gyro), timestamp=float(t))


def sensor_model(true_state: BodyState, params: VehicleParams, noise_cfg: NoiseConfig,
                 rng_seed: int, timestamp: float = 0.0) -> ImuSample:
    """One IMU reading with its own seeded generator; same seed, same sample."""
    rng = np.random.default_rng(rng_seed)
    return _draw(true_state, params, noise_cfg, rng, np.full(3, noise_cfg.gyro_bias), timestamp)


class ImuEmulator:
    """
    Seeded IMU stream. Owns the noise generator and the drifting gyro bias;
    timestamps must strictly increase.
    """

    def __init__(self, params: VehicleParams, noise: NoiseConfig, seed: int):
        self.params = params
        self.noise = noise
        self.rng = np.random.default_rng(seed)
        self.bias = np.full(3, noise.gyro_bias)
        self._last_t: float | None = None

    def sample(self, true_state: BodyState, t: float) -> ImuSample:
        if self._last_t is not None:
            if t <= self._last_t:
                raise ValueError(f"IMU timestamps must increase: {t} after {self._last_t}")
            step = t - self._last_t
            self.bias = self.bias + self.noise.gyro_drift * math.sqrt(step) * self.rng.standard_normal(3)
        self._last_t = t
        return _draw(true_state, self.params, self.noise, self.rng, self.bias, t)


# =========================
# attitude estimation
# =========================
def accel_angles(sample: ImuSample, g: float = 9.81) -> tuple[float, float]:
    """
    Roll and pitch (rad) from the gravity direction.

    Raises:
        FreeFall: specific force below 0.1 g, no usable gravity reference.
    """
    ax, ay, az = sample.ax, sample.ay, sample.az
    if math.sqrt(ax * ax + ay * ay + az * az) < FREE_FALL_FRACTION * g:
        raise FreeFall(f"accelerometer magnitude below {FREE_FALL_FRACTION:g} g")
    roll = math.atan2(-ay, -az)
    pitch = math.atan2(ax, math.sqrt(ay * ay + az * az))
    return roll, pitch


def complementary_step(angle_prev: float, gyro_rate: float, accel_angle: float, alpha: float, dt: float) -> float:
    """angle = alpha (angle_prev + gyro dt) + (1 - alpha) accel_angle"""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    return alpha * (angle_prev + gyro_rate * dt) + (1.0 - alpha) * accel_angle


def lowpass_blend(prev: float, x: float, alpha: float) -> float:
    """First-order blend y = alpha y_prev + (1 - alpha) x; alpha = 0 passes x through."""
    return alpha * prev + (1.0 - alpha) * x


@dataclass(frozen=True)
class AttitudeEstimate:
    """What the controller sees: filtered angles and (optionally smoothed) gyro rates."""

    phi: float = 0.0
    theta: float = 0.0
    p: float = 0.0
    q: float = 0.0
    r: float = 0.0


class AttitudeEstimator:
    """
    Complementary roll/pitch filter plus optional gyro low-pass. The first
    update initializes the angles from the accelerometer.
    """

    def __init__(self, alpha: float, dt: float, gyro_alpha: float = 0.0, g: float = 9.81):
        if not 0.0 <= gyro_alpha < 1.0:
            raise ValueError("gyro_alpha must be in [0, 1)")
        self.alpha = alpha
        self.dt = dt
        self.gyro_alpha = gyro_alpha
        self.g = g
        self.estimate: AttitudeEstimate | None = None

    def update(self, sample: ImuSample) -> AttitudeEstimate:
        roll_acc, pitch_acc = accel_angles(sample, self.g)
        prev = self.estimate
        if prev is None:
            self.estimate = AttitudeEstimate(roll_acc, pitch_acc, sample.gx, sample.gy, sample.gz)
            return self.estimate
        p = lowpass_blend(prev.p, sample.gx, self.gyro_alpha)
        q = lowpass_blend(prev.q, sample.gy, self.gyro_alpha)
        r = lowpass_blend(prev.r, sample.gz, self.gyro_alpha)
        self.estimate = AttitudeEstimate(
            complementary_step(prev.phi, sample.gx, roll_acc, self.alpha, self.dt),
            complementary_step(prev.theta, sample.gy, pitch_acc, self.alpha, self.dt),
            p, q, r,
        )
        return self.estimate
