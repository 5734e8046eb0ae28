from __future__ import annotations

from functools import lru_cache

import numpy as np

from quadlab.common.errors import InfeasibleEffort, MotorSaturation
from quadlab.dynamics.params import VehicleParams
from quadlab.dynamics.state import ControlEfforts, MotorSpeeds


@lru_cache(maxsize=32)
def mixing_matrix(params: VehicleParams) -> np.ndarray:
    """Linear map from squared rotor speeds to (U1, U2, U3, U4)."""
    b, d, lb = params.b, params.d, params.l * params.b
    return np.array([
        [b, b, b, b],
        [-lb, -lb, lb, lb],
        [lb, -lb, -lb, lb],
        [-d, d, -d, d],
    ])


@lru_cache(maxsize=32)
def _unmixing_matrix(params: VehicleParams) -> np.ndarray:
    return np.linalg.inv(mixing_matrix(params))


def residual_speed(omegas, params: VehicleParams) -> float:
    o1, o2, o3, o4 = omegas
    res = o1 - o2 + o3 - o4
    return params.b * res if params.omega_residual_includes_b else res


def mix_motors(speeds: MotorSpeeds, params: VehicleParams) -> ControlEfforts:
    omegas = speeds.to_array()
    u = mixing_matrix(params) @ (omegas * omegas)
    return ControlEfforts(*(float(v) for v in u), omega_res=float(residual_speed(omegas, params)))


def _squared_speeds(efforts: ControlEfforts, params: VehicleParams) -> np.ndarray:
    return _unmixing_matrix(params) @ efforts.to_array()


def unmix_motors(efforts: ControlEfforts, params: VehicleParams, check_max: bool = True) -> MotorSpeeds:
    """
    Rotor speeds that produce the requested efforts.

    Raises InfeasibleEffort naming the first rotor whose squared speed comes
    out negative, and MotorSaturation when a rotor would exceed omega_max.
    """
    sq = _squared_speeds(efforts, params)
    floor = 1e-12 * max(float(np.max(np.abs(sq))), 1.0)
    for i, s in enumerate(sq, start=1):
        if s < -floor:
            raise InfeasibleEffort(i, float(s))
    omegas = np.sqrt(np.clip(sq, 0.0, None))
    if check_max:
        for i, o in enumerate(omegas, start=1):
            if o > params.omega_max * (1 + 1e-12):
                raise MotorSaturation(i, float(o), params.omega_max)
    return MotorSpeeds(*(float(o) for o in omegas))


def unmix_clamped(efforts: ControlEfforts, params: VehicleParams) -> tuple[MotorSpeeds, bool]:
    """Like unmix_motors, but clamps each rotor into [0, omega_max] and reports whether it had to."""
    sq = _squared_speeds(efforts, params)
    top = params.omega_max ** 2
    clamped = np.clip(sq, 0.0, top)
    saturated = bool(np.any(np.abs(clamped - sq) > 1e-9 * top))
    return MotorSpeeds(*(float(o) for o in np.sqrt(clamped))), saturated
