from quadlab.controller.pid import Direction, Mode, PidGains, PidState, pid_step, reset_integral, set_mode
from quadlab.controller.cascade import CascadeConfig, CascadePids, CascadeResult, cascade_step
from quadlab.controller.attitude_model import AttitudeModel, attitude_model
from quadlab.controller.scenarios import SCENARIOS, Scenario, build_scenario
from quadlab.controller.closed_loop import (
    CHANNEL_COLUMNS, ClosedLoopConfig, ClosedLoopResult, closed_loop_simulate, loop_rate_sweep, settling_floors,
    sweep_dt,
)

__all__ = [
    "Direction", "Mode", "PidGains", "PidState", "pid_step", "reset_integral", "set_mode",
    "CascadeConfig", "CascadePids", "CascadeResult", "cascade_step",
    "AttitudeModel", "attitude_model",
    "SCENARIOS", "Scenario", "build_scenario",
    "CHANNEL_COLUMNS", "ClosedLoopConfig", "ClosedLoopResult", "closed_loop_simulate", "loop_rate_sweep",
    "settling_floors", "sweep_dt",
]
