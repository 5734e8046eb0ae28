# quadlab/sensors/traces.py
"""Side-by-side filter comparisons on an IMU roll stream and a receiver stick step."""
from __future__ import annotations

import math

import numpy as np
import pandas as pd

from quadlab.dynamics.params import VehicleParams
from quadlab.dynamics.state import BodyState
from quadlab.sensors.filters import SMOOTHING_KINDS, FilterConfig, apply_filter, filter_step
from quadlab.sensors.imu import AttitudeEstimator, ImuEmulator, NoiseConfig, accel_angles
from quadlab.sensors.receiver import pwm_quantize, stick, stick_to_width


def stream_configured(x, filter_cfg: FilterConfig) -> np.ndarray:
    """Run a record through the configured kind one sample at a time, as the flight loop does."""
    out = np.empty(len(x))
    state: tuple[float, ...] = ()
    for k, v in enumerate(x):
        out[k], state = filter_step(state, v, filter_cfg)
    return out


def imu_traces(
    params: VehicleParams,
    filter_cfg: FilterConfig,
    noise: NoiseConfig,
    seed: int,
    duration: float = 10.0,
    amplitude_deg: float = 10.0,
    freq_hz: float = 0.5,
) -> pd.DataFrame:
    """
    Roll angle (deg) through every filter for a sinusoidal roll motion:
    truth, raw accelerometer angle, complementary estimate and each low-pass.
    `configured` is the stream the flight loop would record for filter_cfg.kind.
    """
    dt = 1.0 / filter_cfg.sample_rate_hz
    n = int(round(duration / dt))
    t = np.arange(n) * dt
    w = 2.0 * math.pi * freq_hz
    amp = math.radians(amplitude_deg)
    truth = amp * np.sin(w * t)

    imu = ImuEmulator(params, noise, seed)
    est = AttitudeEstimator(filter_cfg.alpha, dt, g=params.g)
    raw = np.empty(n)
    comp = np.empty(n)
    for k in range(n):
        sample = imu.sample(BodyState(phi=truth[k], p=amp * w * math.cos(w * t[k])), t[k])
        raw[k] = accel_angles(sample, params.g)[0]
        comp[k] = est.update(sample).phi

    frame = pd.DataFrame({"t": t, "truth": np.degrees(truth), "raw": np.degrees(raw),
                          "complementary": np.degrees(comp)})
    for kind in SMOOTHING_KINDS:
        frame[kind] = np.degrees(apply_filter(raw, filter_cfg, kind))
    if filter_cfg.kind == "complementary":
        frame["configured"] = frame["complementary"]
    else:
        frame["configured"] = np.degrees(stream_configured(raw, filter_cfg))
    return frame


def receiver_step_traces(
    filter_cfg: FilterConfig,
    step_deg: float = 10.0,
    limit_deg: float = 45.0,
    step_time: float = 0.5,
    duration: float = 2.0,
) -> pd.DataFrame:
    """Quantized roll-stick step (deg), its smoothed versions and the configured kind's stream."""
    dt = 1.0 / filter_cfg.sample_rate_hz
    n = int(round(duration / dt))
    t = np.arange(n) * dt
    width = np.where(t >= step_time - 1e-9, pwm_quantize(stick_to_width(step_deg, limit_deg)),
                     pwm_quantize(stick_to_width(0.0, limit_deg)))
    raw = np.array([stick(w, limit_deg) for w in width])
    frame = pd.DataFrame({"t": t, "pwm": width.astype(int), "raw": raw})
    for kind in SMOOTHING_KINDS:
        frame[kind] = apply_filter(raw, filter_cfg, kind)
    frame["configured"] = raw if filter_cfg.kind == "complementary" else stream_configured(raw, filter_cfg)
    return frame
