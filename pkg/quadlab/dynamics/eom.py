"""
Nonlinear rigid-body equations of motion of the quadcopter.

Conventions: body z axis is the thrust axis and inertial z points up, so
gravity resolved in body axes is (g sin(theta), -g cos(theta) sin(phi),
-g cos(theta) cos(phi)). Euler angles are applied in yaw-pitch-roll order.
"""
from __future__ import annotations

import math

import numpy as np

from quadlab.common.errors import SingularAttitude
from quadlab.dynamics.mixing import mix_motors
from quadlab.dynamics.params import VehicleParams
from quadlab.dynamics.state import BodyState, ControlEfforts, MotorSpeeds

SINGULAR_TOL = 1e-6


def body_to_inertial(phi: float, theta: float, psi: float) -> np.ndarray:
    cf, sf = math.cos(phi), math.sin(phi)
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(psi), math.sin(psi)
    return np.array([
        [cp * ct, cp * st * sf - sp * cf, cp * st * cf + sp * sf],
        [sp * ct, sp * st * sf + cp * cf, sp * st * cf - cp * sf],
        [-st, ct * sf, ct * cf],
    ])


def state_derivative(x, u, omega_res: float, params: VehicleParams) -> np.ndarray:
    """Array form used by the integrators: x in canonical order, u = (U1..U4)."""
    uu, vv, ww, p, q, r, _, _, _, phi, theta, psi = x
    if abs(theta) >= math.pi / 2 - SINGULAR_TOL:
        raise SingularAttitude(float(theta))
    u1, u2, u3, u4 = u
    g, m = params.g, params.mass
    ixx, iyy, izz, jtp = params.ixx, params.iyy, params.izz, params.jtp
    gyro_sign = -1.0 if params.printed_gyro_sign else 1.0

    cf, sf = math.cos(phi), math.sin(phi)
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(psi), math.sin(psi)

    du = vv * r - ww * q + g * st
    dv = ww * p - uu * r - g * ct * sf
    dw = uu * q - vv * p - g * ct * cf + u1 / m
    dp = (iyy - izz) / ixx * q * r - jtp / ixx * q * omega_res + u2 / ixx
    dq = (izz - ixx) / iyy * p * r + gyro_sign * jtp / iyy * p * omega_res + u3 / iyy
    dr = (ixx - iyy) / izz * p * q + u4 / izz

    # body -> inertial velocity (yaw-pitch-roll)
    dx = cp * ct * uu + (cp * st * sf - sp * cf) * vv + (cp * st * cf + sp * sf) * ww
    dy = sp * ct * uu + (sp * st * sf + cp * cf) * vv + (sp * st * cf - cp * sf) * ww
    dz = -st * uu + ct * sf * vv + ct * cf * ww

    lift = q * sf + r * cf
    dphi = p + lift * st / ct
    dtheta = q * cf - r * sf
    dpsi = lift / ct
    return np.array([du, dv, dw, dp, dq, dr, dx, dy, dz, dphi, dtheta, dpsi])


def eom_derivative(state: BodyState, efforts: ControlEfforts, params: VehicleParams) -> np.ndarray:
    """12-vector time derivative of `state` under constant `efforts`."""
    return state_derivative(
        state.to_array(),
        (efforts.u1, efforts.u2, efforts.u3, efforts.u4),
        efforts.omega_res,
        params,
    )


def hover_trim(params: VehicleParams) -> tuple[MotorSpeeds, ControlEfforts]:
    """Equal rotor speeds whose thrust balances the weight."""
    speeds = MotorSpeeds.uniform(params.hover_speed)
    efforts = mix_motors(speeds, params)
    return speeds, ControlEfforts(params.mass * params.g, 0.0, 0.0, 0.0, efforts.omega_res)
