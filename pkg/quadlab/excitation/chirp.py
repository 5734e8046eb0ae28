# quadlab/excitation/chirp.py
"""
Exponential frequency sweep for identification flights.

    K(t)     = c2 (exp(c1 t / t_rec) - 1)
    omega(t) = omega_min + K(t) (omega_max - omega_min)
    delta    = A sin(phase),  phase <- phase + omega dt   (Euler)

With the stock constants K(t_rec) = 1.00228, so the sweep ends 0.228% of
the span above omega_max; omega is not clamped.
"""
from __future__ import annotations

import math

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator


class ChirpSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    c1: float = Field(4.0, gt=0)
    c2: float = Field(0.0187, gt=0)
    omega_min: float = Field(0.3, gt=0, description="rad/s")
    omega_max: float = Field(40.0, gt=0, description="rad/s")
    amplitude: float = Field(4.5, gt=0, description="command units")
    t_rec: float = Field(90.0, gt=0, description="s")
    trim_pad: float = Field(3.0, ge=0, description="s of trim before and after the sweep")

    @model_validator(mode="after")
    def _band(self) -> "ChirpSpec":
        if not self.omega_min < self.omega_max:
            raise ValueError(f"omega_min {self.omega_min} must be below omega_max {self.omega_max}")
        return self


def sweep_gain(spec: ChirpSpec, t) -> np.ndarray | float:
    return spec.c2 * (np.exp(spec.c1 * np.asarray(t, dtype=float) / spec.t_rec) - 1.0)


def sweep_omega(spec: ChirpSpec, t) -> np.ndarray | float:
    return spec.omega_min + sweep_gain(spec, t) * (spec.omega_max - spec.omega_min)


def chirp_sample(spec: ChirpSpec, t: float, phase: float, dt: float) -> tuple[float, float]:
    """
    Sweep value at t and the phase for the next sample.

    Example:
        delta, phase = chirp_sample(spec, 0.0, 0.0, 0.01)   # delta == 0.0
    """
    if not 0.0 <= t <= spec.t_rec:
        raise ValueError(f"t={t} outside the sweep [0, {spec.t_rec}]")
    delta = spec.amplitude * math.sin(phase)
    return delta, phase + float(sweep_omega(spec, t)) * dt


def chirp_signal(spec: ChirpSpec, dt: float = 0.01) -> pd.DataFrame:
    """
    Trim pad of zeros, the sweep, trim pad of zeros: columns t, delta,
    omega, phase. omega and phase are zero in the leading pad; the trailing
    pad holds the final phase.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    n_pad = int(round(spec.trim_pad / dt))
    n_rec = int(round(spec.t_rec / dt))

    delta = np.zeros(n_rec)
    omega = np.zeros(n_rec)
    phases = np.zeros(n_rec)
    phase = 0.0
    for k in range(n_rec):
        t = k * dt
        phases[k] = phase
        omega[k] = sweep_omega(spec, t)
        delta[k], phase = chirp_sample(spec, t, phase, dt)

    pad = np.zeros(n_pad)
    frame = pd.DataFrame({
        "delta": np.concatenate([pad, delta, pad]),
        "omega": np.concatenate([pad, omega, pad]),
        "phase": np.concatenate([pad, phases, np.full(n_pad, phase)]),
    })
    frame.insert(0, "t", np.arange(len(frame)) * dt)
    return frame
