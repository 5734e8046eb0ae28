# quadlab/linearization/analysis.py
from __future__ import annotations

import logging

import numpy as np
import pandas as pd

from quadlab.common.lti import free_response, require_control
from quadlab.dynamics.state import EFFORT_NAMES, STATE_INDEX, STATE_NAMES
from quadlab.linearization.jacobian import LinearModel

log = logging.getLogger(__name__)


# =========================
# printed hover model (internal state order)
# =========================
def _printed_a() -> np.ndarray:
    a = np.zeros((12, 12))
    s = STATE_INDEX
    a[s["u"], s["theta"]] = 9.81
    a[s["v"], s["phi"]] = -9.81
    a[s["w"], s["phi"]] = -9.81
    a[s["p"], s["q"]] = -1.63
    a[s["q"], s["p"]] = 1.63
    for row, col in (("x", "u"), ("y", "v"), ("z", "w"), ("phi", "p"), ("theta", "q"), ("psi", "r")):
        a[s[row], s[col]] = 1.0
    return a


def _printed_b() -> np.ndarray:
    b = np.zeros((12, 4))
    b[STATE_INDEX["w"], 0] = 0.7143
    b[STATE_INDEX["p"], 1] = 12.3457
    b[STATE_INDEX["q"], 2] = 12.3457
    b[STATE_INDEX["r"], 3] = 7.0423
    return b


PRINTED_A = _printed_a()
PRINTED_B = _printed_b()


# =========================
# open-loop analysis
# =========================
def eigenvalues(model: LinearModel) -> np.ndarray:
    return np.linalg.eigvals(model.a)


def classify(poles, tol: float = 1e-8) -> str:
    """'asymptotically stable', 'marginal' (poles on the axis, none right) or 'unstable'."""
    re = np.real(np.asarray(poles))
    if np.all(re < -tol):
        return "asymptotically stable"
    if np.any(re > tol):
        return "unstable"
    return "marginal"


def controllability(model: LinearModel, rtol: float = 1e-8) -> tuple[int, bool]:
    """
    Rank of [B AB ... A^(n-1)B] from its singular values, counting those
    above rtol * sigma_max.

    Example:
        rank, ok = controllability(linearize_at(*hover_trim(p), p))
    """
    k = np.asarray(require_control().ctrb(model.a, model.b))
    sv = np.linalg.svd(k, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0, False
    rank = int(np.sum(sv > rtol * sv[0]))
    return rank, rank == model.n_states


def impulse_response(
    model: LinearModel,
    channel: int | str,
    dt: float,
    duration: float,
    magnitude: float = 1.0,
) -> pd.DataFrame:
    """
    Free response of xdot = A x after an impulse.

    `channel` is an effort index (0..3, the impulse enters through that B
    column and has units of effort * s) or a state name (that state is
    kicked by `magnitude`). Runs python-control's initial response from the
    post-impulse state.
    """
    x = np.zeros(model.n_states)
    if isinstance(channel, str):
        x[model.state_order.index(channel)] = magnitude
    else:
        x = model.b[:, int(channel)] * magnitude
    return free_response(model.a, x, dt, duration, model.state_order)


def first_crossing(frame: pd.DataFrame, column: str, threshold: float) -> float | None:
    """First time |column| exceeds threshold, or None."""
    hit = np.flatnonzero(np.abs(frame[column].to_numpy()) > threshold)
    return float(frame["t"].iloc[hit[0]]) if hit.size else None


# =========================
# errata
# =========================
def errata_report(model: LinearModel, atol: float = 1e-3) -> dict:
    """
    Entry-by-entry comparison of a computed hover model with the printed
    matrices. Lists every A entry that differs and the B zero/nonzero
    pattern plus value differences.
    """
    if model.state_order != STATE_NAMES:
        raise ValueError("errata_report needs the model in the internal state order")
    a_diff = []
    for i, j in zip(*np.nonzero(np.abs(model.a - PRINTED_A) > atol)):
        a_diff.append({
            "row": STATE_NAMES[i] + "_dot", "col": STATE_NAMES[j],
            "computed": float(model.a[i, j]), "printed": float(PRINTED_A[i, j]),
        })
    pattern_match = bool(np.array_equal(model.b != 0, PRINTED_B != 0))
    b_diff = []
    for i, j in zip(*np.nonzero(np.abs(model.b - PRINTED_B) > atol)):
        b_diff.append({
            "row": STATE_NAMES[i] + "_dot", "col": EFFORT_NAMES[j].upper(),
            "computed": float(model.b[i, j]), "printed": float(PRINTED_B[i, j]),
        })
    if a_diff or b_diff:
        log.info("printed hover model differs in %d A and %d B entries", len(a_diff), len(b_diff))
    return {"a_entries": a_diff, "b_pattern_match": pattern_match, "b_entries": b_diff}
