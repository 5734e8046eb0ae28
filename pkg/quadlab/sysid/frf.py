# quadlab/sysid/frf.py
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field
from scipy import signal

from quadlab.common.errors import NonuniformSampling, RecordTooShort

log = logging.getLogger(__name__)

MIN_WINDOWS = 4
VALID_COHERENCE_WINDOWS = 5
# raw coherence above 1 by more than this counts as a violation
COHERENCE_SLACK = 1e-9


class WindowConfig(BaseModel):
    """Welch segmenting: Hann windows, 50% overlap, mean removed per segment."""

    model_config = ConfigDict(frozen=True)

    nperseg: int = Field(2048, gt=8)
    overlap: float = Field(0.5, ge=0.0, lt=1.0)
    window: str = "hann"
    detrend: str = "constant"

    @property
    def noverlap(self) -> int:
        return int(self.nperseg * self.overlap)

    def windows_for(self, n: int) -> int:
        if n < self.nperseg:
            return 0
        return 1 + (n - self.nperseg) // (self.nperseg - self.noverlap)


@dataclass(frozen=True, eq=False)
class FrequencyResponse:
    """
    Averaged frequency response estimate on a rad/s grid (DC dropped).

    `coherence_valid` is False when fewer than 5 windows were averaged;
    `clamp_violations` counts raw coherence values that exceeded 1.
    """

    freqs: np.ndarray
    response: np.ndarray
    coherence: np.ndarray
    nperseg: int
    noverlap: int
    n_windows: int
    coherence_valid: bool = True
    clamp_violations: int = 0

    @property
    def magnitude_db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 20.0 * np.log10(np.abs(self.response))

    @property
    def phase_deg(self) -> np.ndarray:
        return np.degrees(np.unwrap(np.angle(self.response)))

    def band(self, lo: float, hi: float) -> np.ndarray:
        return (self.freqs >= lo) & (self.freqs <= hi)

    def to_frame(self) -> pd.DataFrame:
        """Plot-ready table: freq (rad/s), mag_dB, phase_deg, coherence."""
        return pd.DataFrame({
            "freq": self.freqs,
            "mag_dB": self.magnitude_db,
            "phase_deg": self.phase_deg,
            "coherence": self.coherence,
        })


def check_uniform(times, rtol: float = 1e-6) -> float:
    """Sample interval of a uniformly sampled time base, else NonuniformSampling."""
    times = np.asarray(times, dtype=float)
    if times.size < 2:
        raise RecordTooShort("need at least two samples")
    steps = np.diff(times)
    dt = float(np.median(steps))
    if dt <= 0 or np.max(np.abs(steps - dt)) > rtol * dt:
        raise NonuniformSampling(f"sample interval varies by {np.max(np.abs(steps - dt)):.3g} s around {dt:.6g} s")
    return dt


def estimate_frf(
    input_signal,
    output_signal,
    sample_rate: float,
    window_cfg: WindowConfig | None = None,
    times=None,
) -> FrequencyResponse:
    """
    H = Gxy / Gxx and coherence |Gxy|^2 / (Gxx Gyy) from Welch-averaged
    auto and cross spectra.

    Raises:
        RecordTooShort: fewer than 4 windows fit in the record.
        NonuniformSampling: `times` given and not evenly spaced.
    """
    cfg = window_cfg or WindowConfig()
    x = np.asarray(input_signal, dtype=float)
    y = np.asarray(output_signal, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"input and output must be equal-length 1-D records, got {x.shape} and {y.shape}")
    if times is not None:
        check_uniform(times)
    n_win = cfg.windows_for(x.size)
    if n_win < MIN_WINDOWS:
        raise RecordTooShort(f"{x.size} samples give {n_win} windows of {cfg.nperseg}; need {MIN_WINDOWS}")

    kw = dict(fs=sample_rate, window=cfg.window, nperseg=cfg.nperseg, noverlap=cfg.noverlap, detrend=cfg.detrend)
    f, pxx = signal.welch(x, **kw)
    _, pyy = signal.welch(y, **kw)
    _, pxy = signal.csd(x, y, **kw)
    f, pxx, pyy, pxy = f[1:], pxx[1:], pyy[1:], pxy[1:]

    excited = pxx > 0
    response = np.zeros_like(pxy)
    response[excited] = pxy[excited] / pxx[excited]
    denom = pxx * pyy
    raw = np.zeros_like(pxx)
    ok = denom > 0
    raw[ok] = np.abs(pxy[ok]) ** 2 / denom[ok]
    violations = int(np.sum(raw > 1.0 + COHERENCE_SLACK))
    if violations:
        log.warning("%d coherence values above 1 clamped", violations)
    valid = n_win >= VALID_COHERENCE_WINDOWS
    if not valid:
        log.warning("coherence from only %d windows is not reliable", n_win)

    return FrequencyResponse(
        freqs=2.0 * np.pi * f,
        response=response,
        coherence=np.clip(raw, 0.0, 1.0),
        nperseg=cfg.nperseg,
        noverlap=cfg.noverlap,
        n_windows=n_win,
        coherence_valid=valid,
        clamp_violations=violations,
    )
