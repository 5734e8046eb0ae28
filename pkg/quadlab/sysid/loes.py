# quadlab/sysid/loes.py
"""
Lower-order equivalent system fits: a second-order denominator, a first-order
(or pure-derivative) numerator and a pure time delay,

    H(s) = (b1 s + b0) / (s^2 + a1 s + a0) * exp(-tau s)

fitted to a measured frequency response by coherence-weighted multi-start
Nelder-Mead on magnitude (dB) and phase (deg) errors.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml
from scipy.optimize import minimize

from quadlab.common.errors import InsufficientCoherence, NoStableFit
from quadlab.common.io import atomic_write_text
from quadlab.sysid.frf import FrequencyResponse

log = logging.getLogger(__name__)

# numerator terms fitted per structure (highest power first)
STRUCTURES: dict[str, tuple[str, ...]] = {
    "roll-angle": ("b1",),
    "pitch-angle": ("b1",),
    "yaw-rate": ("b1", "b0"),
    "full": ("b1", "b0"),
}

MIN_COHERENCE = 0.6
MIN_RUN = 5
PHASE_WEIGHT = 0.01745 ** 2
TAU_MAX = 0.5
TAU_START = 0.05
MAX_DAMPING = 3.0
MAX_COST = 1.0


@dataclass(frozen=True)
class LoesModel:
    """num and den are polynomial coefficients in s, highest power first; den is monic."""

    num: tuple[float, ...]
    den: tuple[float, ...]
    tau: float = 0.0
    structure: str = "full"
    fit_cost: float = 0.0

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError(f"delay must be >= 0, got {self.tau}")
        if not self.den or self.den[0] == 0:
            raise ValueError("denominator needs a nonzero leading coefficient")

    @property
    def natural_frequency(self) -> float:
        return math.sqrt(self.den[-1] / self.den[0])

    @property
    def damping(self) -> float:
        return self.den[-2] / (2.0 * self.den[0] * self.natural_frequency)

    @property
    def dc_gain(self) -> float:
        return self.num[-1] / self.den[-1]

    @property
    def is_stable(self) -> bool:
        return bool(np.all(np.real(np.roots(self.den)) < 0))

    def printed(self, var: str = "s") -> str:
        """Human-readable form, e.g. `2.305s / (s^2 + 3.894s + 3.967) * e^(-0.197s)`."""
        return f"{_poly_str(self.num, var)} / ({_poly_str(self.den, var)}) * e^(-{self.tau:.4g}{var})"


def _poly_str(coeffs, var: str) -> str:
    order = len(coeffs) - 1
    terms = []
    for i, c in enumerate(coeffs):
        power = order - i
        if c == 0:
            continue
        mag = f"{abs(c):.4g}"
        if power > 0 and abs(c) == 1.0:
            mag = ""
        body = mag + (var if power >= 1 else "") + (f"^{power}" if power > 1 else "")
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        text += f" {sign} {body}"
    return text


# printed models of the test vehicle
ROLL_ANGLE_REFERENCE = LoesModel((2.305, 0.0), (1.0, 3.894, 3.967), 0.197, "roll-angle")
PITCH_ANGLE_REFERENCE = LoesModel((2.008, 0.0), (1.0, 3.206, 4.058), 0.2, "pitch-angle")
YAW_RATE_REFERENCE = LoesModel((10.68, 138.8), (1.0, 11.64, 163.8), 0.0592, "yaw-rate")
REFERENCE_MODELS = {
    "roll-angle": ROLL_ANGLE_REFERENCE,
    "pitch-angle": PITCH_ANGLE_REFERENCE,
    "yaw-rate": YAW_RATE_REFERENCE,
}


def tf_frequency_response(model: LoesModel, freqs) -> np.ndarray:
    """H(jw) exp(-jw tau) on a grid of positive rad/s frequencies."""
    w = np.asarray(freqs, dtype=float)
    s = 1j * w
    return np.polyval(model.num, s) / np.polyval(model.den, s) * np.exp(-s * model.tau)


def synthetic_frf(model: LoesModel, freqs, coherence: float = 1.0) -> FrequencyResponse:
    """Exact response of `model` packaged as a measurement (fixtures and refits)."""
    freqs = np.asarray(freqs, dtype=float)
    return FrequencyResponse(freqs, tf_frequency_response(model, freqs), np.full(freqs.size, coherence),
                             nperseg=0, noverlap=0, n_windows=0)


# =========================
# fitting
# =========================
@dataclass
class FitTrace:
    """Per-start outcome, the best-so-far cost after each accepted start and the grid actually fitted."""

    starts: list[dict] = field(default_factory=list)
    best_history: list[float] = field(default_factory=list)
    used_freqs: np.ndarray = field(default_factory=lambda: np.empty(0))


def _longest_run(mask: np.ndarray) -> int:
    best = run = 0
    for m in mask:
        run = run + 1 if m else 0
        best = max(best, run)
    return best


def _unpack(p: np.ndarray, n_num: int, structure: str) -> LoesModel:
    b = p[:n_num]
    a1, a0 = math.exp(p[n_num]), math.exp(p[n_num + 1])
    tau = min(max(p[n_num + 2], 0.0), TAU_MAX)
    num = (float(b[0]), 0.0) if n_num == 1 else tuple(float(v) for v in b)
    return LoesModel(num, (1.0, a1, a0), tau, structure)


def _cost(h_fit: np.ndarray, h_meas: np.ndarray, weight: np.ndarray) -> float:
    with np.errstate(divide="ignore", invalid="ignore"):
        mag = 20.0 * (np.log10(np.abs(h_fit)) - np.log10(np.abs(h_meas)))
    phase = np.degrees(np.angle(h_fit / h_meas))
    terms = weight * (mag ** 2 + PHASE_WEIGHT * phase ** 2)
    val = float(np.mean(terms))
    return val if math.isfinite(val) else 1e12


def _numerator_ls(w, h, weight, a1, a0, tau, n_num) -> np.ndarray:
    """Equation-error least squares for the numerator at a fixed denominator and delay."""
    s = 1j * w
    target = h * np.polyval([1.0, a1, a0], s) * np.exp(s * tau)
    cols = [s] if n_num == 1 else [s, np.ones_like(s)]
    m = np.column_stack(cols)
    sw = np.sqrt(weight)[:, None]
    lhs = np.vstack([(m * sw).real, (m * sw).imag])
    rhs = np.concatenate([(target * sw[:, 0]).real, (target * sw[:, 0]).imag])
    coef, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    return coef


def fit_loes(
    frf: FrequencyResponse,
    structure: str = "full",
    freq_band: tuple[float, float] = (0.5, 12.0),
    min_coherence: float = MIN_COHERENCE,
    maxiter: int = 4000,
    trace: FitTrace | None = None,
) -> LoesModel:
    """
    Best LOES fit of `frf` inside `freq_band` (rad/s).

    Points with coherence below `min_coherence` are left out. Eight starts:
    four natural frequencies spread geometrically over the band, damping
    0.5 and 1.0, delay 0.05 s, numerator by least squares. Fits with
    damping above 3 or cost above 1 are rejected as degenerate.

    Raises:
        InsufficientCoherence: fewer than 5 contiguous usable points.
        NoStableFit: every start was rejected.
    """
    if structure not in STRUCTURES:
        raise ValueError(f"unknown structure '{structure}'; valid: {', '.join(STRUCTURES)}")
    lo, hi = freq_band
    in_band = frf.band(lo, hi)
    usable = in_band & (frf.coherence >= min_coherence) & (np.abs(frf.response) > 0)
    if _longest_run(usable[in_band]) < MIN_RUN:
        raise InsufficientCoherence(
            f"need {MIN_RUN} contiguous points with coherence >= {min_coherence} in [{lo}, {hi}] rad/s"
        )
    w, h, weight = frf.freqs[usable], frf.response[usable], frf.coherence[usable]
    n_num = len(STRUCTURES[structure])
    trace = trace if trace is not None else FitTrace()
    trace.used_freqs = w.copy()

    def objective(p: np.ndarray) -> float:
        model = _unpack(p, n_num, structure)
        penalty = 0.0
        tau = p[n_num + 2]
        if tau < 0.0:
            penalty = 1e3 * tau ** 2
        elif tau > TAU_MAX:
            penalty = 1e3 * (tau - TAU_MAX) ** 2
        return _cost(tf_frequency_response(model, w), h, weight) + penalty

    best: LoesModel | None = None
    for wn in np.geomspace(max(lo, 1e-3), hi, 4):
        for zeta in (0.5, 1.0):
            a1, a0 = 2.0 * zeta * wn, wn * wn
            b = _numerator_ls(w, h, weight, a1, a0, TAU_START, n_num)
            p0 = np.concatenate([b, [math.log(a1), math.log(a0), TAU_START]])
            res = minimize(objective, p0, method="Nelder-Mead",
                           options={"maxiter": maxiter, "maxfev": 2 * maxiter, "xatol": 1e-8, "fatol": 1e-12})
            cost = float(res.fun)
            model = _unpack(res.x, n_num, structure)
            model = LoesModel(model.num, model.den, model.tau, structure, cost)
            accepted = model.damping <= MAX_DAMPING and cost <= MAX_COST
            log.debug("start wn=%.3g zeta=%.1f -> cost %.4g%s", wn, zeta, cost, "" if accepted else " (rejected)")
            trace.starts.append({"omega_n0": float(wn), "zeta0": zeta, "cost": cost,
                                 "damping": model.damping, "accepted": accepted})
            if not accepted:
                continue
            if best is None or cost < best.fit_cost:
                best = model
            trace.best_history.append(best.fit_cost)

    rejected = sum(1 for s in trace.starts if not s["accepted"])
    if rejected:
        log.warning("%d of %d fit starts rejected as degenerate", rejected, len(trace.starts))
    if best is None:
        raise NoStableFit(f"no acceptable {structure} fit in [{lo}, {hi}] rad/s (structure mismatch?)")
    log.info("%s fit: %s (cost %.4g)", structure, best.printed(), best.fit_cost)
    return best


# =========================
# model summary file
# =========================
def write_model_summary(path: str | Path, model: LoesModel) -> Path:
    payload = {
        "structure": model.structure,
        "num": [float(v) for v in model.num],
        "den": [float(v) for v in model.den],
        "tau": float(model.tau),
        "fit_cost": float(model.fit_cost),
        "omega_n": model.natural_frequency,
        "zeta": model.damping,
        "dc_gain": model.dc_gain,
        "printed": model.printed(),
    }
    return atomic_write_text(path, yaml.safe_dump(payload, sort_keys=False))


def read_model_summary(path: str | Path) -> LoesModel:
    data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    try:
        return LoesModel(
            tuple(float(v) for v in data["num"]),
            tuple(float(v) for v in data["den"]),
            float(data.get("tau", 0.0)),
            str(data.get("structure", "full")),
            float(data.get("fit_cost", 0.0)),
        )
    except KeyError as e:
        raise ValueError(f"{path}: model summary lacks '{e.args[0]}'") from None
