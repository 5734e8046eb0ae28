# quadlab/common/errors.py
from __future__ import annotations


class QuadlabError(Exception):
    """Base for every error the workbench raises on purpose."""


# =========================
# config
# =========================
class ConfigError(QuadlabError):
    pass


class UnknownKey(ConfigError):
    def __init__(self, key: str, valid: list[str] | None = None):
        self.key = key
        hint = f" (valid keys: {', '.join(sorted(valid))})" if valid else ""
        super().__init__(f"unknown config key '{key}'{hint}")


class TypeMismatch(ConfigError):
    pass


class MissingRequired(ConfigError):
    def __init__(self, key: str):
        self.key = key
        super().__init__(f"config key '{key}' has no value")


# =========================
# simulation
# =========================
class SimulationError(QuadlabError):
    pass


class SingularAttitude(SimulationError):
    def __init__(self, theta: float):
        self.theta = theta
        super().__init__(f"pitch {theta:.6f} rad is at the Euler-rate singularity")


class AttitudeDiverged(SimulationError):
    """Raised when |roll| or |pitch| leaves the flyable envelope (a crash)."""

    def __init__(self, time: float, angle_deg: float, trajectory=None):
        self.time = time
        self.angle_deg = angle_deg
        self.trajectory = trajectory
        super().__init__(f"attitude diverged at t={time:.3f} s ({angle_deg:.1f} deg)")


class InfeasibleEffort(SimulationError):
    def __init__(self, component: int, value: float, message: str | None = None):
        self.component = component
        self.value = value
        super().__init__(
            message or f"rotor {component} needs omega^2 = {value:.6g} < 0"
        )


class MotorSaturation(InfeasibleEffort):
    def __init__(self, component: int, value: float, limit: float):
        self.limit = limit
        super().__init__(
            component, value,
            f"rotor {component} needs omega = {value:.6g} rad/s above omega_max {limit:.6g}",
        )


# =========================
# sensors / geo
# =========================
class SensorError(QuadlabError):
    pass


class FreeFall(SensorError):
    pass


class GeoError(QuadlabError):
    pass


class DegenerateBearing(GeoError):
    pass


# =========================
# system identification
# =========================
class SysidError(QuadlabError):
    pass


class RecordTooShort(SysidError):
    pass


class NonuniformSampling(SysidError):
    pass


class InsufficientCoherence(SysidError):
    pass


class NoStableFit(SysidError):
    pass


# =========================
# log files
# =========================
class LogFormatError(QuadlabError):
    pass


class MalformedRow(LogFormatError):
    def __init__(self, line: int, detail: str = ""):
        self.line = line
        super().__init__(f"malformed row at line {line}" + (f": {detail}" if detail else ""))


class HeaderMismatch(LogFormatError):
    pass


class MissingChannel(LogFormatError):
    pass
