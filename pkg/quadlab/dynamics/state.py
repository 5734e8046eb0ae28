from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields

import numpy as np

# internal canonical order; the matrices are built in this order
STATE_NAMES = ("u", "v", "w", "p", "q", "r", "x", "y", "z", "phi", "theta", "psi")
# order used when printing matrices for reports
REPORT_ORDER = ("x", "y", "z", "u", "v", "w", "phi", "theta", "psi", "p", "q", "r")
EFFORT_NAMES = ("u1", "u2", "u3", "u4")
STATE_INDEX = {name: i for i, name in enumerate(STATE_NAMES)}


@dataclass(frozen=True)
class BodyState:
    """Body-axis velocities and rates, inertial position (z up) and Euler angles."""

    u: float = 0.0
    v: float = 0.0
    w: float = 0.0
    p: float = 0.0
    q: float = 0.0
    r: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    phi: float = 0.0
    theta: float = 0.0
    psi: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in astuple(self)):
            raise ValueError(f"non-finite state component in {self}")

    def to_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_array(cls, arr) -> "BodyState":
        return cls(*(float(v) for v in arr))

    def replace(self, **changes) -> "BodyState":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return BodyState(**values)


@dataclass(frozen=True)
class MotorSpeeds:
    """Rotor speeds in rad/s: front-right, rear-right, rear-left, front-left."""

    omega1: float
    omega2: float
    omega3: float
    omega4: float

    def __post_init__(self):
        if min(astuple(self)) < 0.0:
            raise ValueError(f"rotor speeds must be >= 0, got {astuple(self)}")

    def to_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    @classmethod
    def uniform(cls, omega: float) -> "MotorSpeeds":
        return cls(omega, omega, omega, omega)


@dataclass(frozen=True)
class ControlEfforts:
    """Vertical thrust u1 (N), body torques u2..u4 (N m) and the residual rotor term."""

    u1: float
    u2: float = 0.0
    u3: float = 0.0
    u4: float = 0.0
    omega_res: float = 0.0

    def to_array(self) -> np.ndarray:
        return np.array([self.u1, self.u2, self.u3, self.u4], dtype=float)
