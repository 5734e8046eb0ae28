from __future__ import annotations

import logging
import math
from typing import Callable

import numpy as np
import pandas as pd

from quadlab.common.errors import AttitudeDiverged, SingularAttitude
from quadlab.dynamics.eom import state_derivative
from quadlab.dynamics.mixing import mix_motors
from quadlab.dynamics.params import VehicleParams
from quadlab.dynamics.state import STATE_NAMES, BodyState, MotorSpeeds

log = logging.getLogger(__name__)

MAX_DT = 0.05
CRASH_ANGLE = math.radians(89.0)


def rk4_step(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float) -> np.ndarray:
    """Classical 4th-order Runge-Kutta step of xdot = f(x) with inputs held over the step."""
    k1 = f(x)
    k2 = f(x + 0.5 * h * k1)
    k3 = f(x + 0.5 * h * k2)
    k4 = f(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _check_dt(dt: float) -> None:
    if not 0.0 < dt <= MAX_DT:
        raise ValueError(f"dt must be in (0, {MAX_DT}] s, got {dt}")


def integrate_step(state: BodyState, speeds: MotorSpeeds, params: VehicleParams, dt: float) -> BodyState:
    _check_dt(dt)
    e = mix_motors(speeds, params)
    u = (e.u1, e.u2, e.u3, e.u4)
    x = rk4_step(lambda s: state_derivative(s, u, e.omega_res, params), state.to_array(), dt)
    return BodyState.from_array(x)


def crashed(x) -> float | None:
    """Offending attitude in degrees when roll or pitch is past the crash angle."""
    worst = max(abs(x[9]), abs(x[10]))
    return math.degrees(worst) if worst > CRASH_ANGLE else None


def simulate(
    initial: BodyState,
    command_source: Callable[[float, BodyState], MotorSpeeds],
    params: VehicleParams,
    dt: float,
    duration: float,
    max_samples: int = 2_000_000,
) -> pd.DataFrame:
    """
    Fixed-step open-loop run. `command_source(t, state)` returns the rotor
    speeds held over the next step.

    Returns one row per sample: t, the 12 states, omega1..4 and u1..u4.
    Raises AttitudeDiverged (with the partial trajectory attached) when
    roll or pitch passes 89 degrees.
    """
    _check_dt(dt)
    n = int(round(duration / dt))
    if n > max_samples:
        raise ValueError(f"{n} samples exceed max_samples={max_samples}")

    rows = []
    x = initial.to_array()
    for k in range(n + 1):
        t = k * dt
        state = BodyState.from_array(x)
        speeds = command_source(t, state)
        e = mix_motors(speeds, params)
        rows.append((t, *x, *speeds.to_array(), e.u1, e.u2, e.u3, e.u4))
        if k == n:
            break
        u = (e.u1, e.u2, e.u3, e.u4)
        try:
            x = rk4_step(lambda s: state_derivative(s, u, e.omega_res, params), x, dt)
        except SingularAttitude:
            x = np.full_like(x, np.nan)
            angle = 90.0
        else:
            angle = crashed(x)
        if angle is not None:
            traj = _frame(rows)
            log.warning("open-loop run diverged at t=%.3f s", t + dt)
            raise AttitudeDiverged(t + dt, angle, traj)
    return _frame(rows)


def _frame(rows) -> pd.DataFrame:
    cols = ["t", *STATE_NAMES, "omega1", "omega2", "omega3", "omega4", "u1", "u2", "u3", "u4"]
    return pd.DataFrame(rows, columns=cols)
