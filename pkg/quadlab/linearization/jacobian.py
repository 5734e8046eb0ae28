# quadlab/linearization/jacobian.py
from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from quadlab.common.io import atomic_write_text
from quadlab.dynamics.eom import state_derivative
from quadlab.dynamics.params import VehicleParams
from quadlab.dynamics.state import EFFORT_NAMES, REPORT_ORDER, STATE_NAMES, BodyState, ControlEfforts

log = logging.getLogger(__name__)

# entries below this are finite-difference noise
SNAP_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class LinearModel:
    """
    xdot = a x + b U, y = c x + d U about `trim`.

    Matrices are stored in the internal state order (u v w p q r x y z phi
    theta psi); `reordered(REPORT_ORDER)` gives the X Y Z U V W ... layout
    used in printed reports.
    """

    a: np.ndarray
    b: np.ndarray
    trim: tuple[BodyState, ControlEfforts] | None = None
    state_order: tuple[str, ...] = STATE_NAMES
    c: np.ndarray = field(default=None)
    d: np.ndarray = field(default=None)

    def __post_init__(self):
        n = len(self.state_order)
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.shape != (n, n) or b.shape != (n, len(EFFORT_NAMES)):
            raise ValueError(f"expected a {n}x{n} and b {n}x4, got {a.shape} and {b.shape}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("linear model has non-finite entries")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", np.eye(n))
        object.__setattr__(self, "d", np.zeros_like(b))

    @property
    def n_states(self) -> int:
        return len(self.state_order)

    def entry(self, row: str, col: str) -> float:
        """A entry d(row_dot)/d(col) by state name."""
        return float(self.a[self.state_order.index(row), self.state_order.index(col)])

    def input_entry(self, row: str, effort: str) -> float:
        return float(self.b[self.state_order.index(row), EFFORT_NAMES.index(effort)])

    def reordered(self, order=REPORT_ORDER) -> "LinearModel":
        idx = [self.state_order.index(name) for name in order]
        return LinearModel(self.a[np.ix_(idx, idx)], self.b[idx, :], self.trim, tuple(order))


def _steps(x: np.ndarray) -> np.ndarray:
    return np.maximum(1e-6, 1e-6 * np.abs(x))


def _snap(m: np.ndarray, tol: float) -> np.ndarray:
    out = m.copy()
    out[np.abs(out) < tol] = 0.0
    return out


def linearize_at(
    state: BodyState,
    efforts: ControlEfforts,
    params: VehicleParams,
    snap_tol: float = SNAP_TOL,
) -> LinearModel:
    """
    Central-difference Jacobians of the equations of motion.

    Each state and effort is perturbed by h_i = max(1e-6, 1e-6 |v_i|); the
    residual rotor term is held at its trim value. Entries smaller than
    `snap_tol` are set to exactly zero so integrator chains stay nilpotent.

    Raises:
        SingularAttitude: trim pitch at +-90 deg.
    """
    x0 = state.to_array()
    u0 = efforts.to_array()
    res = efforts.omega_res
    f = lambda x, u: state_derivative(x, u, res, params)

    n, m = x0.size, u0.size
    a = np.zeros((n, n))
    hx = _steps(x0)
    for i in range(n):
        dx = np.zeros(n)
        dx[i] = hx[i]
        a[:, i] = (f(x0 + dx, u0) - f(x0 - dx, u0)) / (2.0 * hx[i])

    b = np.zeros((n, m))
    hu = _steps(u0)
    for j in range(m):
        du = np.zeros(m)
        du[j] = hu[j]
        b[:, j] = (f(x0, u0 + du) - f(x0, u0 - du)) / (2.0 * hu[j])

    model = LinearModel(_snap(a, snap_tol), _snap(b, snap_tol), (state, efforts))
    log.debug("linearized: %d nonzero A entries, %d nonzero B entries",
              np.count_nonzero(model.a), np.count_nonzero(model.b))
    return model


def linear_derivative(model: LinearModel, x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """xdot = A (x - x*) + B (U - U*) in the internal order."""
    if model.state_order != STATE_NAMES:
        raise ValueError("linear_derivative needs the model in the internal state order")
    x_star, u_star = model.trim if model.trim else (BodyState(), ControlEfforts(0.0))
    return model.a @ (np.asarray(x) - x_star.to_array()) + model.b @ (np.asarray(u) - u_star.to_array())


def write_matrices(path: str | Path, model: LinearModel, order=REPORT_ORDER) -> Path:
    """
    Plain-text dump for external tools: A then B, row-major, whitespace
    separated, with a '#' header naming the row/column order.
    """
    view = model.reordered(order)
    buf = io.StringIO()
    buf.write(f"# states: {' '.join(view.state_order)}\n")
    buf.write(f"# inputs: {' '.join(name.upper() for name in EFFORT_NAMES)}\n")
    buf.write("# A (12x12)\n")
    np.savetxt(buf, view.a, fmt="%.10g")
    buf.write("# B (12x4)\n")
    np.savetxt(buf, view.b, fmt="%.10g")
    path = atomic_write_text(path, buf.getvalue())
    log.info("linear model written to %s", path)
    return path


def read_matrices(path: str | Path) -> tuple[np.ndarray, np.ndarray, tuple[str, ...]]:
    """Inverse of write_matrices: (a, b, state order as written)."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    order = tuple(lines[0].split(":", 1)[1].split())
    rows = [np.array(line.split(), dtype=float) for line in lines if line.strip() and not line.startswith("#")]
    n = len(order)
    if len(rows) != 2 * n:
        raise ValueError(f"expected {2 * n} matrix rows in {path}, found {len(rows)}")
    return np.vstack(rows[:n]), np.vstack(rows[n:]), order


__all__ = ["LinearModel", "linearize_at", "linear_derivative", "write_matrices", "read_matrices", "SNAP_TOL"]
