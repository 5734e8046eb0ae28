# quadlab/validation/timedomain.py
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy import signal

from quadlab.common.metrics import correlation_lag, peak_ratio, rms
from quadlab.logio.flightlog import AXIS_CHANNELS, require_channels
from quadlab.sysid.frf import check_uniform
from quadlab.sysid.loes import LoesModel

log = logging.getLogger(__name__)

WINDOW = (-0.5, 5.0)


def simulate_tf(model: LoesModel, input_signal, dt: float) -> np.ndarray:
    """
    Response of `model` to a sampled input starting from rest: Tustin
    discretization of the rational part, then the delay as a linearly
    interpolated fractional-sample shift.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    u = np.asarray(input_signal, dtype=float)
    bz, az = signal.bilinear(model.num, model.den, fs=1.0 / dt)
    y = signal.lfilter(bz, az, u)
    if model.tau > 0:
        t = np.arange(u.size) * dt
        y = np.interp(t - model.tau, t, y, left=0.0)
    return y


@dataclass(frozen=True, eq=False)
class DoubletValidation:
    rms_error: float
    peak_ratio: float
    lag_s: float
    window: tuple[float, float]
    overlay: pd.DataFrame

    def metrics(self) -> dict:
        return {"rms_error": self.rms_error, "peak_ratio": self.peak_ratio, "lag_s": self.lag_s,
                "window_s": list(self.window)}


def validate_doublet(model: LoesModel, flight_log: pd.DataFrame, axis: str, window=WINDOW) -> DoubletValidation:
    """
    Compare the model's prediction with a logged doublet response.

    The window runs from 0.5 s before the first nonzero input sample to 5 s
    after it. Peak ratio is predicted over measured; lag is positive when
    the measurement trails the prediction.

    Raises:
        MissingChannel: the log lacks the axis input or response column.
    """
    if axis not in AXIS_CHANNELS:
        raise ValueError(f"unknown axis '{axis}'; valid: {', '.join(AXIS_CHANNELS)}")
    in_col, out_col = AXIS_CHANNELS[axis]
    require_channels(flight_log, "t", in_col, out_col)

    t = flight_log["t"].to_numpy(dtype=float)
    dt = check_uniform(t)
    u = flight_log[in_col].to_numpy(dtype=float)
    y = flight_log[out_col].to_numpy(dtype=float)
    predicted = simulate_tf(model, u, dt)

    active = np.flatnonzero(u != 0.0)
    start = t[active[0]] if active.size else t[0]
    lo, hi = start + window[0], start + window[1]
    keep = (t >= lo - 1e-9) & (t <= hi + 1e-9)

    overlay = pd.DataFrame({"t": t[keep], "input": u[keep], "measured": y[keep], "predicted": predicted[keep]})
    result = DoubletValidation(
        rms_error=rms(overlay["predicted"] - overlay["measured"]),
        peak_ratio=peak_ratio(overlay["predicted"], overlay["measured"]),
        lag_s=correlation_lag(overlay["predicted"], overlay["measured"], dt),
        window=(float(lo), float(hi)),
        overlay=overlay,
    )
    log.info("%s doublet: rms %.4g, peak ratio %.3f, lag %.3f s", axis, result.rms_error,
             result.peak_ratio, result.lag_s)
    return result
