# quadlab/logio/flightlog.py
"""
Flight-log CSV, one row per control frame.

    # quadlab-v1
    t,pwm1,...,kill
    0,1280,1536,...

Floats are printed with 6 significant digits; PWM widths and flags are
integers. Angles are degrees, rates deg/s, motors in microsecond-equivalent
ESC commands. Column order is fixed and checked on read.
"""
from __future__ import annotations

import io
import logging
from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import Iterable

import numpy as np
import pandas as pd

from quadlab import FORMAT_TAG
from quadlab.common.errors import HeaderMismatch, MalformedRow, MissingChannel
from quadlab.common.io import atomic_write_text

log = logging.getLogger(__name__)

TAG_LINE = f"# {FORMAT_TAG}"
INT_COLUMNS = ("pwm1", "pwm2", "pwm3", "pwm4", "pwm5", "pwm6", "trigger", "kill")
# logged stick input and measured response per axis
AXIS_CHANNELS = {
    "roll": ("cmd_roll", "phi"),
    "pitch": ("cmd_pitch", "theta"),
    "yaw": ("cmd_yaw_rate", "r"),
}


@dataclass(frozen=True)
class FlightLogRecord:
    t: float
    pwm1: int
    pwm2: int
    pwm3: int
    pwm4: int
    pwm5: int
    pwm6: int
    cmd_roll: float
    cmd_pitch: float
    cmd_yaw_rate: float
    cmd_throttle: float
    phi: float
    theta: float
    p: float
    q: float
    r: float
    ax: float
    ay: float
    az: float
    motor1: float
    motor2: float
    motor3: float
    motor4: float
    u1: float
    u2: float
    u3: float
    u4: float
    trigger: int
    kill: int


LOG_COLUMNS = tuple(f.name for f in fields(FlightLogRecord))

# header rows before the first record; data line numbers are 1-based
_HEADER_LINES = 2


def records_to_frame(records: Iterable[FlightLogRecord]) -> pd.DataFrame:
    frame = pd.DataFrame([astuple(r) for r in records], columns=list(LOG_COLUMNS))
    return _typed(frame)


def _typed(frame: pd.DataFrame) -> pd.DataFrame:
    frame = frame.copy()
    for col in LOG_COLUMNS:
        frame[col] = frame[col].astype(int if col in INT_COLUMNS else float)
    return frame


def write_log(path: str | Path, records: Iterable[FlightLogRecord] | pd.DataFrame) -> Path:
    frame = records if isinstance(records, pd.DataFrame) else records_to_frame(records)
    missing = [c for c in LOG_COLUMNS if c not in frame.columns]
    if missing:
        raise MissingChannel(f"log frame lacks columns: {', '.join(missing)}")
    frame = _typed(frame[list(LOG_COLUMNS)])
    text = TAG_LINE + "\n" + frame.to_csv(index=False, float_format="%.6g")
    path = atomic_write_text(path, text)
    log.info("flight log written: %s (%d frames)", path, len(frame))
    return path


def read_log_frame(path: str | Path) -> pd.DataFrame:
    """
    Parse and check a flight log.

    Raises:
        HeaderMismatch: missing version tag or a different column set/order.
        MalformedRow: a short, long or non-numeric row, or a time that does
            not increase; `line` is the 1-based file line.
    """
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or lines[0].strip() != TAG_LINE:
        raise HeaderMismatch(f"{path}: first line must be '{TAG_LINE}'")
    header = lines[1].strip().split(",") if len(lines) > 1 else []
    if tuple(header) != LOG_COLUMNS:
        raise HeaderMismatch(f"{path}: columns {header} do not match {list(LOG_COLUMNS)}")

    for lineno, row in enumerate(lines[_HEADER_LINES:], start=_HEADER_LINES + 1):
        if row.strip() and row.count(",") != len(LOG_COLUMNS) - 1:
            raise MalformedRow(lineno, "wrong number of fields")
    frame = pd.read_csv(io.StringIO(text), skiprows=1, skip_blank_lines=False)

    values = frame.apply(pd.to_numeric, errors="coerce")
    bad = np.flatnonzero(values.isna().any(axis=1).to_numpy())
    if bad.size:
        raise MalformedRow(int(bad[0]) + _HEADER_LINES + 1, "missing or non-numeric field")
    t = values["t"].to_numpy()
    back = np.flatnonzero(np.diff(t) <= 0)
    if back.size:
        raise MalformedRow(int(back[0]) + _HEADER_LINES + 2, "time does not increase")
    return _typed(values)


def read_log(path: str | Path) -> list[FlightLogRecord]:
    frame = read_log_frame(path)
    return [
        FlightLogRecord(*(int(v) if c in INT_COLUMNS else float(v) for c, v in zip(LOG_COLUMNS, row)))
        for row in frame.itertuples(index=False, name=None)
    ]


def require_channels(frame: pd.DataFrame, *channels: str) -> None:
    missing = [c for c in channels if c not in frame.columns]
    if missing:
        raise MissingChannel(f"log has no channel(s): {', '.join(missing)}")
