# quadlab/common/metrics.py
from __future__ import annotations

import math

import numpy as np
from scipy import signal


def settling_time(t, y, fraction: float = 0.02, floor: float = 0.0) -> float:
    """
    First time after which |y| stays inside the band max(fraction * peak, floor).

    Args:
        t: sample times (s), increasing
        y: response samples, e.g. roll angle after an impulse
        fraction: band as a share of the peak (0.02 -> the 2% criterion)
        floor: absolute band width, for responses riding on sensor noise

    Returns:
        Settling time measured from t[0]; 0.0 for a response that never
        leaves the band and inf when the last sample is still outside it.

    Example:
        ts = settling_time(traj["t"], traj["phi"])
    """
    t = np.asarray(t, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    if not np.all(np.isfinite(y)):
        return math.inf
    peak = float(y.max(initial=0.0))
    outside = np.flatnonzero(y > max(fraction * peak, floor))
    if outside.size == 0:
        return 0.0
    last = int(outside[-1])
    if last == len(y) - 1:
        return math.inf
    return float(t[last + 1] - t[0])


def rise_time(t, y, lo: float = 0.1, hi: float = 0.9) -> float:
    """10-90% rise time of a step response relative to its final value."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    final = y[-1]
    if final == 0.0:
        return math.nan
    frac = y / final
    i_lo = int(np.argmax(frac >= lo))
    i_hi = int(np.argmax(frac >= hi))
    return float(t[i_hi] - t[i_lo])


def rms(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sqrt(np.mean(x * x))) if x.size else 0.0


def peak_ratio(predicted, measured) -> float:
    predicted = np.asarray(predicted, dtype=float)
    measured = np.asarray(measured, dtype=float)
    den = float(np.max(np.abs(measured), initial=0.0))
    return float(np.max(np.abs(predicted), initial=0.0)) / den if den > 0 else math.nan


def correlation_lag(reference, delayed, dt: float, max_lag: float = 1.0) -> float:
    """
    Lag (s) that best aligns `delayed` with `reference` by cross-correlation.

    Positive means `delayed` trails `reference`.
    """
    a = np.asarray(reference, dtype=float) - np.mean(reference)
    b = np.asarray(delayed, dtype=float) - np.mean(delayed)
    corr = signal.correlate(b, a, mode="full")
    lags = signal.correlation_lags(len(b), len(a), mode="full")
    keep = np.abs(lags) <= int(round(max_lag / dt))
    return float(lags[keep][np.argmax(corr[keep])] * dt)
