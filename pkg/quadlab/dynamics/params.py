from __future__ import annotations

import logging
import math

from pydantic import BaseModel, ConfigDict, Field, model_validator

log = logging.getLogger(__name__)


class VehicleParams(BaseModel):
    """
    Rigid-body and rotor constants of the airframe.

    Defaults are the calculated platform values of the test vehicle. The arm
    length was tabulated as "8.25"; read as inches it gives the 0.2096 m arm
    of a 550-class frame.
    """

    model_config = ConfigDict(frozen=True)

    mass: float = Field(1.8, gt=0, description="kg")
    ixx: float = Field(7.06e-3, gt=0, description="kg m^2")
    iyy: float = Field(7.06e-3, gt=0, description="kg m^2")
    izz: float = Field(7.865e-3, gt=0, description="kg m^2")
    jtp: float = Field(1.42e-3, gt=0, description="rotor/prop polar inertia, kg m^2")
    b: float = Field(4.5e-4, gt=0, description="thrust factor, N s^2/rad^2")
    d: float = Field(1.8e-5, gt=0, description="drag factor, N m s^2/rad^2")
    l: float = Field(0.2096, gt=0, description="arm length, m")
    g: float = Field(9.81, gt=0, description="m/s^2")
    omega_max_ratio: float = Field(2.0, gt=1, description="rotor speed ceiling as a multiple of hover speed")
    # model options
    omega_residual_includes_b: bool = True
    printed_gyro_sign: bool = False

    @model_validator(mode="after")
    def _warn_asymmetric(self) -> "VehicleParams":
        if self.ixx != self.iyy:
            log.warning("asymmetric airframe: ixx=%g != iyy=%g", self.ixx, self.iyy)
        return self

    @property
    def hover_speed(self) -> float:
        return math.sqrt(self.mass * self.g / (4.0 * self.b))

    @property
    def omega_max(self) -> float:
        return self.omega_max_ratio * self.hover_speed

    @property
    def max_thrust(self) -> float:
        return 4.0 * self.b * self.omega_max ** 2

    @property
    def hover_throttle(self) -> float:
        return self.mass * self.g / self.max_thrust
