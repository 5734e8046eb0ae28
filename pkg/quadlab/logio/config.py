# quadlab/logio/config.py
"""
Flat workbench config: one `key: value` per line, `#` comments, read with
yaml.safe_load. The shipped file is quadlab/config/workbench.yaml.

    cfg = load_config()              # shipped defaults
    cfg = load_config("my.yaml")     # overrides, everything else defaulted
    params, cascade = cfg.vehicle(), cfg.cascade()
"""
from __future__ import annotations

import logging
from pathlib import Path

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from quadlab import CONFIG_PATH, FORMAT_TAG
from quadlab.common.errors import MissingRequired, TypeMismatch, UnknownKey
from quadlab.common.io import atomic_write_text
from quadlab.dynamics.params import VehicleParams
from quadlab.excitation.chirp import ChirpSpec
from quadlab.sensors.filters import FilterConfig, FilterKind
from quadlab.sensors.imu import NoiseConfig

log = logging.getLogger(__name__)


class WorkbenchConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    format: str = FORMAT_TAG

    # vehicle
    mass: float = Field(1.8, gt=0)
    ixx: float = Field(7.06e-3, gt=0)
    iyy: float = Field(7.06e-3, gt=0)
    izz: float = Field(7.865e-3, gt=0)
    jtp: float = Field(1.42e-3, gt=0)
    b: float = Field(4.5e-4, gt=0)
    d: float = Field(1.8e-5, gt=0)
    l: float = Field(0.2096, gt=0)
    g: float = Field(9.81, gt=0)
    omega_max_ratio: float = Field(2.0, gt=1)
    omega_residual_includes_b: bool = True
    printed_gyro_sign: bool = False

    # gains
    kp_angle: float = 3.604
    ki_angle: float = 0.0
    td_angle: float = 0.0
    kp_rate: float = 0.2209
    ki_rate: float = 0.0
    td_rate: float = 0.014
    kp_yaw: float = 0.1141
    ki_yaw: float = 0.634
    td_yaw: float = 0.0

    # cascade
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

    # filters
    filter_alpha: float = Field(0.98, ge=0, le=1)
    imu_filter_kind: FilterKind = "butterworth2"
    imu_cutoff_hz: float = Field(5.0, gt=0)
    receiver_filter_kind: FilterKind = "butterworth2"
    receiver_cutoff_hz: float = Field(5.0, gt=0)
    chebyshev_ripple_db: float = Field(1.0, gt=0)

    # IMU noise
    accel_noise: float = Field(0.3, ge=0)
    gyro_noise: float = Field(0.02, ge=0)
    gyro_bias: float = 0.005
    gyro_drift: float = Field(1e-4, ge=0)
    seed: int = 7

    # chirp
    chirp_c1: float = Field(4.0, gt=0)
    chirp_c2: float = Field(0.0187, gt=0)
    chirp_omega_min: float = Field(0.3, gt=0)
    chirp_omega_max: float = Field(40.0, gt=0)
    chirp_amplitude_fraction: float = Field(0.1, gt=0, le=1)
    chirp_t_rec: float = Field(90.0, gt=0)
    chirp_trim_pad: float = Field(3.0, ge=0)

    # simulation and spectra
    sim_dt: float = Field(0.01, gt=0)
    max_samples: int = Field(2_000_000, gt=0)
    window_nperseg: int = Field(2048, gt=8)
    window_overlap: float = Field(0.5, ge=0, lt=1)

    @field_validator("format")
    @classmethod
    def _known_format(cls, v: str) -> str:
        if v != FORMAT_TAG:
            raise ValueError(f"unsupported config format '{v}', expected '{FORMAT_TAG}'")
        return v

    @field_validator("receiver_filter_kind")
    @classmethod
    def _receiver_smoothing_only(cls, v: str) -> str:
        if v == "complementary":
            raise ValueError("the receiver has no gyro to blend; pick a low-pass kind")
        return v

    # =========================
    # builders
    # =========================
    def vehicle(self) -> VehicleParams:
        return VehicleParams(
            mass=self.mass, ixx=self.ixx, iyy=self.iyy, izz=self.izz, jtp=self.jtp,
            b=self.b, d=self.d, l=self.l, g=self.g, omega_max_ratio=self.omega_max_ratio,
            omega_residual_includes_b=self.omega_residual_includes_b, printed_gyro_sign=self.printed_gyro_sign,
        )

    def cascade(self):
        # lazy import avoids circulars (controller -> logio.flightlog -> logio)
        from quadlab.controller.cascade import CascadeConfig
        from quadlab.controller.pid import PidGains

        return CascadeConfig(
            angle_gains=PidGains(kp=self.kp_angle, ki=self.ki_angle, td=self.td_angle),
            rate_gains=PidGains(kp=self.kp_rate, ki=self.ki_rate, td=self.td_rate),
            yaw_gains=PidGains(kp=self.kp_yaw, ki=self.ki_yaw, td=self.td_yaw),
            roll_limit_deg=self.roll_limit_deg,
            pitch_limit_deg=self.pitch_limit_deg,
            yaw_rate_limit_dps=self.yaw_rate_limit_dps,
            loop_rate_hz=self.loop_rate_hz,
            negate_derivative=self.negate_derivative,
            derivative_filter_tau=self.derivative_filter_tau,
            rate_cmd_limit_dps=self.rate_cmd_limit_dps,
            torque_limit=self.torque_limit,
            yaw_torque_limit=self.yaw_torque_limit,
            takeoff_throttle=self.takeoff_throttle,
            gyro_lowpass_alpha=self.gyro_lowpass_alpha,
        )

    def imu_filter(self) -> FilterConfig:
        return FilterConfig(kind=self.imu_filter_kind, alpha=self.filter_alpha, cutoff_hz=self.imu_cutoff_hz,
                            ripple_db=self.chebyshev_ripple_db, sample_rate_hz=self.loop_rate_hz)

    def receiver_filter(self) -> FilterConfig:
        return FilterConfig(kind=self.receiver_filter_kind, alpha=self.filter_alpha,
                            cutoff_hz=self.receiver_cutoff_hz, ripple_db=self.chebyshev_ripple_db,
                            sample_rate_hz=self.loop_rate_hz)

    def axis_limit(self, axis: str) -> float:
        limits = {"roll": self.roll_limit_deg, "pitch": self.pitch_limit_deg, "yaw": self.yaw_rate_limit_dps}
        if axis not in limits:
            raise ValueError(f"unknown axis '{axis}'; valid: {', '.join(limits)}")
        return limits[axis]

    def chirp(self, axis: str = "roll") -> ChirpSpec:
        """Sweep spec with the amplitude set to the configured fraction of the axis command limit."""
        return ChirpSpec(
            c1=self.chirp_c1, c2=self.chirp_c2, omega_min=self.chirp_omega_min, omega_max=self.chirp_omega_max,
            amplitude=self.chirp_amplitude_fraction * self.axis_limit(axis),
            t_rec=self.chirp_t_rec, trim_pad=self.chirp_trim_pad,
        )

    def noise(self) -> NoiseConfig:
        return NoiseConfig(accel_noise=self.accel_noise, gyro_noise=self.gyro_noise,
                           gyro_bias=self.gyro_bias, gyro_drift=self.gyro_drift)

    def window(self):
        from quadlab.sysid.frf import WindowConfig

        return WindowConfig(nperseg=self.window_nperseg, overlap=self.window_overlap)

    def closed_loop(self, seed: int | None = None):
        from quadlab.controller.closed_loop import ClosedLoopConfig

        return ClosedLoopConfig(
            params=self.vehicle(),
            cascade=self.cascade(),
            noise=self.noise(),
            chirp=self.chirp(),
            imu_filter=self.imu_filter(),
            receiver_filter=self.receiver_filter(),
            filter_alpha=self.filter_alpha,
            excitation_fraction=self.chirp_amplitude_fraction,
            seed=self.seed if seed is None else seed,
            max_samples=self.max_samples,
        )


def _parse(text: str, source: str) -> dict:
    data = yaml.safe_load(text)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise TypeMismatch(f"{source}: config must be a flat 'key: value' mapping")
    valid = list(WorkbenchConfig.model_fields)
    for key, value in data.items():
        if key not in WorkbenchConfig.model_fields:
            raise UnknownKey(str(key), valid)
        if value is None:
            raise MissingRequired(key)
        if isinstance(value, (dict, list)):
            raise TypeMismatch(f"{source}: '{key}' must be a scalar, got {type(value).__name__}")
    return data


def load_config(path: str | Path | None = None) -> WorkbenchConfig:
    """
    Read a workbench config; keys left out keep their shipped defaults.

    Raises:
        UnknownKey: a key the workbench does not know.
        MissingRequired: a key written with no value.
        TypeMismatch: wrong value type or a value outside its valid range.
    """
    path = Path(path) if path is not None else CONFIG_PATH
    data = _parse(path.read_text(encoding="utf-8"), str(path))
    try:
        cfg = WorkbenchConfig(**data)
    except ValidationError as e:
        err = e.errors()[0]
        key = ".".join(str(p) for p in err["loc"])
        raise TypeMismatch(f"{path}: '{key}': {err['msg']}") from None
    log.debug("loaded %d config keys from %s", len(data), path)
    return cfg


def dump_config(cfg: WorkbenchConfig, path: str | Path | None = None) -> str:
    """Flat text form of `cfg`; written atomically when `path` is given."""
    text = yaml.safe_dump(cfg.model_dump(), sort_keys=False, default_flow_style=False)
    if path is not None:
        atomic_write_text(path, text)
    return text
