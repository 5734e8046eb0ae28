from __future__ import annotations
from pathlib import Path
import json
import math
from datetime import datetime

from quadlab.common.io import atomic_write_text


def timestamp() -> str:
    return datetime.now().isoformat(timespec="seconds")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if hasattr(obj, "tolist"):  # numpy arrays and scalars
        return _jsonable(obj.tolist())
    if isinstance(obj, Path):
        return str(obj)
    return obj


def to_json(payload) -> str:
    return json.dumps(_jsonable(payload), indent=2)


def write_json(path: str | Path, payload) -> None:
    atomic_write_text(path, to_json(payload))


def write_summary(path: str | Path, title: str, rows: dict) -> None:
    """Human-readable `key: value` summary next to the machine-readable json."""
    width = max((len(k) for k in rows), default=0)
    lines = [f"# {title}", f"# written {timestamp()}"]
    lines += [f"{k.ljust(width)} : {v}" for k, v in rows.items()]
    atomic_write_text(path, "\n".join(lines) + "\n")
