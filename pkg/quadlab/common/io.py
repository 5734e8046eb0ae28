from __future__ import annotations
import os
import tempfile
from pathlib import Path

import pandas as pd


def ensure_dir(p: str | Path) -> Path:
    p = Path(p)
    p.mkdir(parents=True, exist_ok=True)
    return p


def atomic_write_text(path: str | Path, text: str) -> Path:
    """Write-then-rename so readers never see a half-written file."""
    path = Path(path)
    ensure_dir(path.parent)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def write_frame_csv(path: str | Path, df: pd.DataFrame, float_format: str = "%.6g") -> Path:
    """Plot-ready CSV (one per figure-style artifact)."""
    return atomic_write_text(path, df.to_csv(index=False, float_format=float_format))


def read_frame_csv(path: str | Path) -> pd.DataFrame:
    return pd.read_csv(Path(path), comment="#")
