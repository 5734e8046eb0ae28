# quadlab/sensors/filters.py
"""
Discrete smoothing filters for IMU and receiver streams.

The low-pass family is designed by scipy at the digital sample rate, i.e.
bilinear transform with the cutoff prewarped, so the -3 dB point lands on
`cutoff_hz`. Streaming steps run `scipy.signal.lfilter` one sample at a
time on a carried delay-line state, so they match the batch filter exactly.

DC gains: lowpass1, butterworth2 and bessel2 have unit DC gain. The
2nd-order Chebyshev type I sits at the bottom of its ripple band at DC,
gain 10**(-ripple_db/20).
"""
from __future__ import annotations

from functools import lru_cache
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import signal

FilterKind = Literal["complementary", "lowpass1", "butterworth2", "chebyshev1", "bessel2"]
SMOOTHING_KINDS = ("lowpass1", "butterworth2", "chebyshev1", "bessel2")


class FilterConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: FilterKind = "butterworth2"
    alpha: float = Field(0.98, ge=0.0, le=1.0)
    cutoff_hz: float = Field(5.0, gt=0)
    ripple_db: float = Field(1.0, gt=0)
    sample_rate_hz: float = Field(100.0, gt=0)

    @model_validator(mode="after")
    def _below_nyquist(self) -> "FilterConfig":
        if self.kind != "complementary" and not self.cutoff_hz < self.sample_rate_hz / 2:
            raise ValueError(f"cutoff {self.cutoff_hz} Hz must be below Nyquist ({self.sample_rate_hz / 2} Hz)")
        return self

    def with_kind(self, kind: str) -> "FilterConfig":
        return self.model_copy(update={"kind": kind})


@lru_cache(maxsize=64)
def _design(kind: str, cutoff_hz: float, ripple_db: float, fs: float) -> tuple[np.ndarray, np.ndarray]:
    if kind == "lowpass1":
        b, a = signal.butter(1, cutoff_hz, btype="low", fs=fs)
    elif kind == "butterworth2":
        b, a = signal.butter(2, cutoff_hz, btype="low", fs=fs)
    elif kind == "chebyshev1":
        b, a = signal.cheby1(2, ripple_db, cutoff_hz, btype="low", fs=fs)
    elif kind == "bessel2":
        b, a = signal.bessel(2, cutoff_hz, btype="low", norm="mag", fs=fs)
    else:
        raise ValueError(f"'{kind}' is not a smoothing filter; expected one of {SMOOTHING_KINDS}")
    return b, a


def design(cfg: FilterConfig, kind: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(b, a) coefficients for `kind` (defaults to cfg.kind)."""
    return _design(kind or cfg.kind, cfg.cutoff_hz, cfg.ripple_db, cfg.sample_rate_hz)


def dc_gain(cfg: FilterConfig, kind: str | None = None) -> float:
    b, a = design(cfg, kind)
    return float(np.sum(b) / np.sum(a))


# =========================
# streaming
# =========================
def initial_state(cfg: FilterConfig, x0: float = 0.0, kind: str | None = None) -> tuple[float, ...]:
    """Filter state for a stream that has been sitting at x0 (zeros for x0 = 0)."""
    b, a = design(cfg, kind)
    return tuple(float(v) for v in signal.lfilter_zi(b, a) * x0)


def _step(kind: str, state: tuple[float, ...], x: float, cfg: FilterConfig):
    b, a = design(cfg, kind)
    zi = np.asarray(state, dtype=float) if state else np.zeros(len(a) - 1)
    y, zf = signal.lfilter(b, a, [float(x)], zi=zi)
    return float(y[0]), tuple(float(v) for v in zf)


def lowpass1_step(state: tuple[float, ...], x: float, cfg: FilterConfig):
    return _step("lowpass1", state, x, cfg)


def butterworth2_step(state: tuple[float, ...], x: float, cfg: FilterConfig):
    return _step("butterworth2", state, x, cfg)


def chebyshev1_step(state: tuple[float, ...], x: float, cfg: FilterConfig):
    return _step("chebyshev1", state, x, cfg)


def bessel2_step(state: tuple[float, ...], x: float, cfg: FilterConfig):
    return _step("bessel2", state, x, cfg)


def filter_step(state: tuple[float, ...], x: float, cfg: FilterConfig):
    """Dispatch on cfg.kind. Returns (output, new state)."""
    return _step(cfg.kind, state, x, cfg)


# =========================
# batch
# =========================
def apply_filter(x, cfg: FilterConfig, kind: str | None = None) -> np.ndarray:
    """Filter a whole record from rest."""
    b, a = design(cfg, kind)
    return signal.lfilter(b, a, np.asarray(x, dtype=float))
