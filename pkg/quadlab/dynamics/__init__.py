from quadlab.dynamics.params import VehicleParams
from quadlab.dynamics.state import BodyState, ControlEfforts, MotorSpeeds
from quadlab.dynamics.mixing import mix_motors, unmix_clamped, unmix_motors
from quadlab.dynamics.eom import eom_derivative, hover_trim
from quadlab.dynamics.integrate import integrate_step, simulate

__all__ = [
    "VehicleParams", "BodyState", "ControlEfforts", "MotorSpeeds",
    "mix_motors", "unmix_motors", "unmix_clamped",
    "eom_derivative", "hover_trim", "integrate_step", "simulate",
]
