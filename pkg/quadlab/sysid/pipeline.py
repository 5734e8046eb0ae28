# quadlab/sysid/pipeline.py
"""
Flight-test identification: fly a sweep under the stabilizing controller,
estimate the frequency response from logged stick input to filtered
attitude, then fit a lower-order equivalent model.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import pandas as pd

from quadlab.common.io import ensure_dir, write_frame_csv
from quadlab.common.reporters import write_json
from quadlab.controller.attitude_model import attitude_model
from quadlab.controller.closed_loop import ClosedLoopConfig, Plant, closed_loop_simulate
from quadlab.controller.scenarios import check_axis
from quadlab.excitation.chirp import ChirpSpec
from quadlab.logio.flightlog import AXIS_CHANNELS, require_channels, write_log
from quadlab.sensors.imu import NoiseConfig
from quadlab.sysid.frf import FrequencyResponse, WindowConfig, check_uniform, estimate_frf
from quadlab.sysid.loes import FitTrace, LoesModel, fit_loes, tf_frequency_response, write_model_summary

log = logging.getLogger(__name__)

# the one other axis whose coherence is reported per excited axis
OFF_AXIS = {"roll": "pitch", "pitch": "roll", "yaw": "roll"}
# stick input and truth-model channel names per axis
TRUTH_CHANNELS = {"roll": ("roll_ref", "phi"), "pitch": ("pitch_ref", "theta"), "yaw": ("yaw_rate_ref", "r")}
TRUTH_COHERENCE = 0.8
SWEEP_KINDS = ("chirp", "piloted")


@dataclass(eq=False)
class IdentificationReport:
    axis: str
    model: LoesModel
    frf: FrequencyResponse
    off_axis: FrequencyResponse | None = None
    trace: FitTrace = field(default_factory=FitTrace)
    truth_mismatch: dict[str, float] | None = None
    flight_log: pd.DataFrame | None = None

    def coherence_frame(self) -> pd.DataFrame:
        """FRF table plus the off-axis coherence column when one was estimated."""
        frame = self.frf.to_frame()
        if self.off_axis is not None:
            frame[f"coherence_{OFF_AXIS[self.axis]}"] = self.off_axis.coherence
        return frame

    def summary(self) -> dict:
        out = {
            "axis": self.axis,
            "model": self.model.printed(),
            "omega_n": self.model.natural_frequency,
            "zeta": self.model.damping,
            "tau": self.model.tau,
            "dc_gain": self.model.dc_gain,
            "fit_cost": self.model.fit_cost,
            "windows": self.frf.n_windows,
            "coherence_valid": self.frf.coherence_valid,
            "rejected_starts": sum(1 for s in self.trace.starts if not s["accepted"]),
            "fit_points": int(self.trace.used_freqs.size),
        }
        if self.off_axis is not None:
            out["off_axis_max_coherence"] = float(np.max(self.off_axis.coherence))
        if self.truth_mismatch is not None:
            out["truth_mismatch"] = dict(self.truth_mismatch)
        return out

    def write(self, out_dir: str | Path) -> dict[str, Path]:
        """FRF table, model summary and JSON summary; the flight log too when attached."""
        out = ensure_dir(out_dir)
        paths = {
            "frf": write_frame_csv(out / f"frf_{self.axis}.csv", self.coherence_frame()),
            "model": write_model_summary(out / f"model_{self.axis}.yaml", self.model),
        }
        write_json(out / f"sysid_{self.axis}.json", self.summary())
        paths["summary"] = out / f"sysid_{self.axis}.json"
        if self.flight_log is not None:
            paths["log"] = write_log(out / f"sweep_{self.axis}.csv", self.flight_log)
        return paths


def identify_from_log(
    flight_log: pd.DataFrame,
    axis: str,
    structure: str = "full",
    band: tuple[float, float] = (0.5, 12.0),
    window: WindowConfig | None = None,
) -> IdentificationReport:
    """
    FRF and LOES fit for one axis of a logged sweep.

    Raises:
        MissingChannel, RecordTooShort, NonuniformSampling, InsufficientCoherence, NoStableFit
    """
    check_axis(axis)
    in_col, out_col = AXIS_CHANNELS[axis]
    off_col = AXIS_CHANNELS[OFF_AXIS[axis]][1]
    require_channels(flight_log, "t", in_col, out_col)

    t = flight_log["t"].to_numpy(dtype=float)
    fs = 1.0 / check_uniform(t)
    u = flight_log[in_col].to_numpy(dtype=float)
    frf = estimate_frf(u, flight_log[out_col].to_numpy(dtype=float), fs, window, times=t)
    off = None
    if off_col in flight_log.columns:
        off = estimate_frf(u, flight_log[off_col].to_numpy(dtype=float), fs, window)

    trace = FitTrace()
    model = fit_loes(frf, structure, band, trace=trace)
    return IdentificationReport(axis, model, frf, off, trace, flight_log=flight_log)


def truth_mismatch(report: IdentificationReport, cfg: ClosedLoopConfig,
                   band: tuple[float, float] = (0.5, 12.0)) -> dict[str, float]:
    """
    Worst magnitude (dB) and phase (deg) gap between the fitted model and the
    linear closed-loop attitude model, over band points with coherence > 0.8.
    """
    frf = report.frf
    keep = frf.band(*band) & (frf.coherence > TRUTH_COHERENCE)
    if not np.any(keep):
        return {"max_mag_db": float("nan"), "max_phase_deg": float("nan"), "points": 0}
    w = frf.freqs[keep]
    ref_in, ref_out = TRUTH_CHANNELS[report.axis]
    truth = attitude_model(cfg.cascade, cfg.params).frequency_response(w, ref_in, ref_out)
    fitted = tf_frequency_response(report.model, w)
    mag = 20.0 * np.log10(np.abs(fitted) / np.abs(truth))
    phase = np.degrees(np.angle(fitted / truth))
    return {"max_mag_db": float(np.max(np.abs(mag))), "max_phase_deg": float(np.max(np.abs(phase))),
            "points": int(w.size)}


def end_to_end_identify(
    plant: Plant,
    axis: str,
    chirp_spec: ChirpSpec,
    noise_cfg: NoiseConfig,
    seed: int,
    cfg: ClosedLoopConfig | None = None,
    structure: str = "full",
    band: tuple[float, float] = (0.5, 12.0),
    window: WindowConfig | None = None,
    kind: str = "chirp",
    dt: float = 0.01,
) -> IdentificationReport:
    """
    Fly a chirp (or piloted-style) sweep on `axis`, identify it from the log
    and compare the fit with the linear closed-loop truth.

    Example:
        >>> rep = end_to_end_identify("linear", "roll", ChirpSpec(), NoiseConfig.noiseless(), seed=7)
        >>> rep.truth_mismatch["max_mag_db"] < 1.0
        True
    """
    check_axis(axis)
    if kind not in SWEEP_KINDS:
        raise ValueError(f"unknown sweep kind '{kind}'; valid: {', '.join(SWEEP_KINDS)}")
    cfg = replace(cfg or ClosedLoopConfig(), chirp=chirp_spec, noise=noise_cfg, seed=seed)
    run = closed_loop_simulate(plant, cfg, f"{kind}-{axis}", dt)
    log.info("%s sweep on %s: %d frames, %d saturation events", kind, axis, len(run.log), run.saturation_events)

    report = identify_from_log(run.log, axis, structure, band, window)
    report.truth_mismatch = truth_mismatch(report, cfg, band)
    log.info("%s identified: %s; truth gap %.2f dB / %.1f deg", axis, report.model.printed(),
             report.truth_mismatch["max_mag_db"], report.truth_mismatch["max_phase_deg"])
    return report
