# quadlab/excitation/doublet.py
from __future__ import annotations

import numpy as np
import pandas as pd
from scipy import signal

from quadlab.excitation.chirp import ChirpSpec

# highest frequency a hand-flown sweep reaches, rad/s
PILOT_OMEGA_CAP = 8.0


def doublet(amplitude: float, pulse_width: float, start_time: float, dt: float, duration: float) -> pd.DataFrame:
    """+amplitude for one pulse width, -amplitude for the next, zero elsewhere (columns t, delta)."""
    if dt <= 0 or pulse_width <= 0:
        raise ValueError("dt and pulse_width must be > 0")
    n = int(round(duration / dt))
    k0 = int(round(start_time / dt))
    w = int(round(pulse_width / dt))
    if k0 < 0 or k0 + 2 * w > n:
        raise ValueError(f"doublet at {start_time} s with {pulse_width} s pulses does not fit in {duration} s")
    delta = np.zeros(n)
    delta[k0:k0 + w] = amplitude
    delta[k0 + w:k0 + 2 * w] = -amplitude
    return pd.DataFrame({"t": np.arange(n) * dt, "delta": delta})


def piloted_sweep(spec: ChirpSpec, dt: float = 0.01, seed: int = 7) -> pd.DataFrame:
    """
    Stand-in for a hand-flown frequency sweep: slowly rising frequency with
    irregular amplitude and frequency wobble, topping out near 8 rad/s.
    Same column layout and trim pads as chirp_signal.
    """
    rng = np.random.default_rng(seed)
    n_pad = int(round(spec.trim_pad / dt))
    n_rec = int(round(spec.t_rec / dt))
    top = min(spec.omega_max, PILOT_OMEGA_CAP)

    # one-second smoothing of the random modulations
    beta = np.exp(-dt / 1.0)
    smooth = lambda x: signal.lfilter([1.0 - beta], [1.0, -beta], x)
    wobble = smooth(rng.standard_normal(n_rec)) * 3.0
    gain = np.clip(0.75 + smooth(rng.standard_normal(n_rec)) * 2.0, 0.4, 1.0)

    t = np.arange(n_rec) * dt
    omega = spec.omega_min + (top - spec.omega_min) * t / spec.t_rec
    omega = np.clip(omega * (1.0 + 0.15 * wobble), spec.omega_min, top)
    phases = np.concatenate([[0.0], np.cumsum(omega * dt)[:-1]])
    delta = spec.amplitude * gain * np.sin(phases)

    pad = np.zeros(n_pad)
    frame = pd.DataFrame({
        "delta": np.concatenate([pad, delta, pad]),
        "omega": np.concatenate([pad, omega, pad]),
        "phase": np.concatenate([pad, phases, np.full(n_pad, phases[-1] + omega[-1] * dt)]),
    })
    frame.insert(0, "t", np.arange(len(frame)) * dt)
    return frame
