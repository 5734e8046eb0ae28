# quadlab/controller/attitude_model.py
"""
Continuous linear model of the hover attitude loop closed by the cascade.

States: phi, theta, p, q, r, then one filter state per loop with a
derivative gain (the filtered measurement, z' = (y - z) / tau) and one
integrator per loop with an integral gain. References: roll angle, pitch
angle (rad) and yaw rate (rad/s). Output limits are ignored.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import pandas as pd

from quadlab.common.lti import free_response, require_control, siso_response, state_space
from quadlab.controller.cascade import CascadeConfig
from quadlab.controller.pid import PidGains
from quadlab.dynamics.params import VehicleParams

log = logging.getLogger(__name__)

INPUTS = ("roll_ref", "pitch_ref", "yaw_rate_ref")
OUTPUTS = ("phi", "theta", "p", "q", "r")


@dataclass(frozen=True, eq=False)
class AttitudeModel:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    state_names: tuple[str, ...]
    sample_time: float

    @cached_property
    def system(self):
        """The loop as a python-control state-space system, outputs as in OUTPUTS."""
        return state_space(self.a, self.b, self.c)

    def poles(self) -> np.ndarray:
        return np.asarray(require_control().poles(self.system))

    def is_stable(self) -> bool:
        return bool(np.all(np.real(self.poles()) < 0))

    def frequency_response(self, omega, input_name: str = "roll_ref", output_name: str = "phi",
                           zoh_delay: bool = True) -> np.ndarray:
        """
        Complex response at `omega` (rad/s). With `zoh_delay` the half-sample
        lag of a zero-order hold at the loop rate is included.
        """
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
        out = siso_response(self.system, OUTPUTS.index(output_name), INPUTS.index(input_name), omega)
        if zoh_delay:
            out = out * np.exp(-1j * omega * self.sample_time / 2.0)
        return out

    def initial_response(self, kick: dict[str, float], dt: float, duration: float) -> pd.DataFrame:
        """Free response from a state kick such as {"p": 0.5}."""
        x = np.zeros(self.a.shape[0])
        for name, value in kick.items():
            x[self.state_names.index(name)] = value
        return free_response(self.a, x, dt, duration, self.state_names)


def attitude_model(cfg: CascadeConfig, params: VehicleParams) -> AttitudeModel:
    """
    Assemble the closed loop. Needs derivative_filter_tau > 0 whenever a
    derivative gain is set.
    """
    tau = cfg.derivative_filter_tau
    d_sign = -1.0 if cfg.negate_derivative else 1.0
    for g in (cfg.angle_gains, cfg.rate_gains, cfg.yaw_gains):
        if g.td != 0.0 and tau <= 0.0:
            raise ValueError("continuous attitude model needs derivative_filter_tau > 0 with a derivative gain")

    loops = [
        ("roll_angle", "phi", cfg.angle_gains),
        ("pitch_angle", "theta", cfg.angle_gains),
        ("roll_rate", "p", cfg.rate_gains),
        ("pitch_rate", "q", cfg.rate_gains),
        ("yaw_rate", "r", cfg.yaw_gains),
    ]
    names = list(OUTPUTS)
    for tag, _, g in loops:
        if g.td != 0.0:
            names.append(f"{tag}_filt")
    for tag, _, g in loops:
        if g.ki != 0.0:
            names.append(f"{tag}_int")
    n, idx = len(names), {name: i for i, name in enumerate(names)}
    a = np.zeros((n, n))
    b = np.zeros((n, len(INPUTS)))

    def unit(name: str) -> np.ndarray:
        v = np.zeros(n)
        v[idx[name]] = 1.0
        return v

    def close(tag: str, meas: str, g: PidGains, ref_x: np.ndarray, ref_u: np.ndarray):
        """Affine PID output (over states, over references); fills filter and integrator rows."""
        err_x = ref_x - unit(meas)
        out_x, out_u = g.kp * err_x, g.kp * ref_u.copy()
        if g.ki != 0.0:
            k = idx[f"{tag}_int"]
            a[k], b[k] = err_x, ref_u
            out_x = out_x + g.ki * unit(f"{tag}_int")
        if g.td != 0.0:
            k = idx[f"{tag}_filt"]
            slope = (unit(meas) - unit(f"{tag}_filt")) / tau
            a[k] = slope
            out_x = out_x + d_sign * g.td * slope
        return out_x, out_u

    zero_x = np.zeros(n)
    refs = np.eye(len(INPUTS))
    torques = {}
    for axis, (angle_tag, angle, gains), (rate_tag, rate, rate_gains), ref in (
        ("roll", loops[0], loops[2], refs[0]),
        ("pitch", loops[1], loops[3], refs[1]),
    ):
        sp_x, sp_u = close(angle_tag, angle, gains, zero_x, ref)
        torques[axis] = close(rate_tag, rate, rate_gains, sp_x, sp_u)
    torques["yaw"] = close("yaw_rate", "r", cfg.yaw_gains, zero_x, refs[2])

    a[idx["phi"]] = unit("p")
    a[idx["theta"]] = unit("q")
    for axis, rate, inertia in (("roll", "p", params.ixx), ("pitch", "q", params.iyy), ("yaw", "r", params.izz)):
        tx, tu = torques[axis]
        a[idx[rate]] = tx / inertia
        b[idx[rate]] = tu / inertia

    c = np.zeros((len(OUTPUTS), n))
    for i, name in enumerate(OUTPUTS):
        c[i, idx[name]] = 1.0
    model = AttitudeModel(a, b, c, tuple(names), cfg.sample_time)
    log.debug("attitude model: %d states, poles %s", n, np.round(model.poles(), 3))
    return model
