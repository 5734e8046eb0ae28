# quadlab/common/lti.py
"""State-space helpers on top of python-control, shared by the hover and attitude-loop models."""
from __future__ import annotations

import numpy as np
import pandas as pd

try:
    import control as ct
except Exception as e:  # helpful message if missing
    ct = None
    _IMPORT_ERR = e


def require_control():
    """The python-control module, or a RuntimeError saying how to get it."""
    if ct is None:
        raise RuntimeError(
            "python-control not available. Install it first:\n"
            "  pip install control\n"
            f"Underlying import error: {_IMPORT_ERR}"
        )
    return ct


def state_space(a, b, c=None):
    """ct.ss with D = 0; C defaults to the identity so every state is an output."""
    ctl = require_control()
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.eye(a.shape[0]) if c is None else np.asarray(c, dtype=float)
    return ctl.ss(a, b, c, np.zeros((c.shape[0], b.shape[1])))


def free_response(a, x0, dt: float, duration: float, names) -> pd.DataFrame:
    """
    Unforced trajectory of xdot = A x from x0 on a uniform grid, one column
    per state plus `t`.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    ctl = require_control()
    x0 = np.asarray(x0, dtype=float)
    n = int(round(duration / dt))
    t = np.arange(n + 1) * dt
    sys = state_space(a, np.zeros((x0.size, 1)))
    _, y = ctl.initial_response(sys, T=t, X0=x0, squeeze=False)
    frame = pd.DataFrame(np.asarray(y).reshape(x0.size, -1).T, columns=list(names))
    frame.insert(0, "t", t)
    return frame


def siso_response(sys, output: int, inp: int, omega) -> np.ndarray:
    """Complex response of one channel at `omega` (rad/s), in the order given."""
    ctl = require_control()
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    # frequency_response returns points sorted by frequency
    order = np.argsort(omega, kind="stable")
    mag, phase, _ = ctl.frequency_response(sys[output, inp], omega[order])
    h = np.empty(omega.size, dtype=complex)
    h[order] = np.ravel(mag) * np.exp(1j * np.ravel(phase))
    return h
