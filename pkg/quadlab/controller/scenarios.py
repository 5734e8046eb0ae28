# quadlab/controller/scenarios.py
"""
Named flight scenarios. Each factory takes the run config and returns a
Scenario; look them up through SCENARIOS.

Programmed excitation (chirp, doublet, piloted sweep) starts when the
trigger channel goes high, after a trim hold.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from quadlab.common.registry import registry
from quadlab.dynamics.state import BodyState
from quadlab.excitation.chirp import chirp_signal
from quadlab.excitation.doublet import doublet, piloted_sweep

SCENARIOS = registry("scenario")
AXES = ("roll", "pitch", "yaw")

# rate kick of the impulse scenarios, rad/s
IMPULSE_RATE = 0.5
DOUBLET_WIDTH = 1.0
DOUBLET_HOLD = 1.0
DOUBLET_DURATION = 10.0


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    initial: BodyState = BodyState()
    axis: str | None = None
    excitation: pd.DataFrame | None = None
    trigger_time: float = 0.0
    kill: bool = False
    thrust_scale: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)
    duration: float = 5.0

    def excitation_at(self, t: float, dt: float) -> float:
        """Excitation command (deg or deg/s) at time t; zero before the trigger and after the record."""
        if self.excitation is None or t < self.trigger_time - 1e-9:
            return 0.0
        k = int(round((t - self.trigger_time) / dt))
        delta = self.excitation["delta"].to_numpy()
        return float(delta[k]) if 0 <= k < delta.size else 0.0


def axis_limit(cfg, axis: str) -> float:
    c = cfg.cascade
    return {"roll": c.roll_limit_deg, "pitch": c.pitch_limit_deg, "yaw": c.yaw_rate_limit_dps}[axis]


def check_axis(axis: str) -> str:
    if axis not in AXES:
        raise ValueError(f"unknown axis '{axis}'; valid: {', '.join(AXES)}")
    return axis


@SCENARIOS.register("hover")
def _hover(cfg) -> Scenario:
    return Scenario("hover", duration=5.0)


@SCENARIOS.register("initial-roll-5deg")
def _initial_roll(cfg) -> Scenario:
    return Scenario("initial-roll-5deg", BodyState(phi=np.radians(5.0)), axis="roll", duration=5.0)


@SCENARIOS.register("open-loop-perturb")
def _open_loop(cfg) -> Scenario:
    # kill switch on, sticks centred at hover throttle, rotor 1 makes 1% extra thrust
    return Scenario("open-loop-perturb", axis="roll", kill=True, thrust_scale=(1.01, 1.0, 1.0, 1.0), duration=10.0)


def _impulse(axis: str):
    rate = {"roll": "p", "pitch": "q", "yaw": "r"}[axis]

    def build(cfg) -> Scenario:
        return Scenario(f"impulse-{axis}", BodyState(**{rate: IMPULSE_RATE}), axis=axis, duration=5.0)
    return build


def _chirp(axis: str):
    def build(cfg) -> Scenario:
        spec = cfg.chirp.model_copy(update={"amplitude": cfg.excitation_fraction * axis_limit(cfg, axis)})
        body = chirp_signal(spec.model_copy(update={"trim_pad": 0.0}), cfg.cascade.sample_time)
        return Scenario(f"chirp-{axis}", axis=axis, excitation=body, trigger_time=spec.trim_pad,
                        duration=spec.t_rec + 2 * spec.trim_pad)
    return build


def _piloted(axis: str):
    def build(cfg) -> Scenario:
        spec = cfg.chirp.model_copy(update={"amplitude": cfg.excitation_fraction * axis_limit(cfg, axis),
                                            "trim_pad": 0.0})
        body = piloted_sweep(spec, cfg.cascade.sample_time, cfg.seed)
        pad = cfg.chirp.trim_pad
        return Scenario(f"piloted-{axis}", axis=axis, excitation=body, trigger_time=pad,
                        duration=spec.t_rec + 2 * pad)
    return build


def _doublet(axis: str):
    def build(cfg) -> Scenario:
        amp = cfg.excitation_fraction * axis_limit(cfg, axis)
        body = doublet(amp, DOUBLET_WIDTH, 0.0, cfg.cascade.sample_time, 2 * DOUBLET_WIDTH)
        return Scenario(f"doublet-{axis}", axis=axis, excitation=body, trigger_time=DOUBLET_HOLD,
                        duration=DOUBLET_DURATION)
    return build


for _axis in AXES:
    SCENARIOS.register(f"impulse-{_axis}")(_impulse(_axis))
    SCENARIOS.register(f"chirp-{_axis}")(_chirp(_axis))
    SCENARIOS.register(f"piloted-{_axis}")(_piloted(_axis))
    SCENARIOS.register(f"doublet-{_axis}")(_doublet(_axis))


def build_scenario(name: str, cfg) -> Scenario:
    return SCENARIOS.get_or_raise(name, ValueError)(cfg)
