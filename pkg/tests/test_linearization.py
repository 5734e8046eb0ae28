import numpy as np
import pytest

from quadlab.common.errors import SingularAttitude
from quadlab.dynamics import BodyState, ControlEfforts, VehicleParams, hover_trim
from quadlab.dynamics.eom import state_derivative
from quadlab.dynamics.state import REPORT_ORDER, STATE_INDEX
from quadlab.linearization import (
    LinearModel, classify, controllability, eigenvalues, errata_report, first_crossing,
    impulse_response, linear_derivative, linearize_at, read_matrices, write_matrices,
)

P = VehicleParams()


@pytest.fixture(scope="module")
def hover_model():
    return linearize_at(*hover_trim(P), P)


def test_gravity_couplings(hover_model):
    assert hover_model.entry("u", "theta") == pytest.approx(9.81, abs=1e-6)
    assert hover_model.entry("v", "phi") == pytest.approx(-9.81, abs=1e-6)


def test_gravity_couplings_do_not_depend_on_mass_or_inertia():
    other = VehicleParams(mass=3.0, ixx=0.02, iyy=0.02, izz=0.03)
    m = linearize_at(*hover_trim(other), other)
    assert m.entry("u", "theta") == pytest.approx(9.81, abs=1e-6)
    assert m.entry("v", "phi") == pytest.approx(-9.81, abs=1e-6)


def test_input_matrix_from_parameters(hover_model):
    assert hover_model.input_entry("w", "u1") == pytest.approx(1 / P.mass, rel=1e-6)
    assert hover_model.input_entry("p", "u2") == pytest.approx(1 / P.ixx, rel=1e-6)
    assert hover_model.input_entry("q", "u3") == pytest.approx(1 / P.iyy, rel=1e-6)
    assert hover_model.input_entry("r", "u4") == pytest.approx(1 / P.izz, rel=1e-6)
    assert np.count_nonzero(hover_model.b) == 4


def test_kinematic_integrator_rows(hover_model):
    for row, col in (("phi", "p"), ("theta", "q"), ("psi", "r"), ("x", "u"), ("y", "v"), ("z", "w")):
        assert hover_model.entry(row, col) == pytest.approx(1.0, abs=1e-9)


def test_output_matrices(hover_model):
    assert np.array_equal(hover_model.c, np.eye(12))
    assert np.array_equal(hover_model.d, np.zeros((12, 4)))


def test_jacobian_against_forward_difference(hover_model):
    x_star, e_star = hover_trim(P)
    x0, u0 = x_star.to_array(), e_star.to_array()
    f = lambda x, u: state_derivative(x, u, e_star.omega_res, P)
    h = 0.5e-6
    for i in range(12):
        dx = np.zeros(12)
        dx[i] = h
        col = (f(x0 + dx, u0) - f(x0, u0)) / h
        np.testing.assert_allclose(hover_model.a[:, i], col, atol=1e-5)
    for j in range(4):
        du = np.zeros(4)
        du[j] = h
        col = (f(x0, u0 + du) - f(x0, u0)) / h
        np.testing.assert_allclose(hover_model.b[:, j], col, atol=1e-5)


def test_linear_and_nonlinear_agree_to_second_order(hover_model):
    x_star, e_star = hover_trim(P)
    x0, u0 = x_star.to_array(), e_star.to_array()
    direction = np.random.default_rng(5).normal(size=12)
    direction /= np.linalg.norm(direction)
    eps = np.array([1e-3, 3e-4, 1e-4, 3e-5])
    errs = []
    for e in eps:
        x = x0 + e * direction
        nonlinear = state_derivative(x, u0, e_star.omega_res, P) - state_derivative(x0, u0, e_star.omega_res, P)
        errs.append(np.linalg.norm(nonlinear - linear_derivative(hover_model, x, u0)))
    slope = np.polyfit(np.log(eps), np.log(errs), 1)[0]
    assert slope >= 1.9


def test_hover_poles_all_at_origin(hover_model):
    poles = eigenvalues(hover_model)
    assert len(poles) == 12
    assert np.max(np.abs(poles)) < 1e-8
    assert classify(poles) != "asymptotically stable"


def test_synthetic_stable_poles():
    m = LinearModel(-np.eye(12), np.zeros((12, 4)))
    np.testing.assert_allclose(eigenvalues(m), -1.0)
    assert classify(eigenvalues(m)) == "asymptotically stable"


def test_hover_model_is_controllable(hover_model):
    assert controllability(hover_model) == (12, True)


def test_zero_input_matrix_has_rank_zero(hover_model):
    assert controllability(LinearModel(hover_model.a, np.zeros((12, 4)))) == (0, False)


def test_thrust_only_is_not_controllable(hover_model):
    b = np.zeros((12, 4))
    b[:, 0] = hover_model.b[:, 0]
    rank, ok = controllability(LinearModel(hover_model.a, b))
    assert rank < 12 and not ok


def test_zero_model_impulse_is_zero():
    m = LinearModel(np.zeros((12, 12)), np.zeros((12, 4)))
    frame = impulse_response(m, 1, 0.01, 1.0)
    assert np.all(frame.drop(columns="t").to_numpy() == 0.0)


def test_open_loop_roll_impulse_grows_past_20_degrees(hover_model):
    # 1e-3 N m s on U2 gives an initial roll rate of about 0.14 rad/s
    frame = impulse_response(hover_model, 1, 0.01, 10.0, magnitude=1e-3)
    assert frame["p"].iloc[0] == pytest.approx(1e-3 / P.ixx)
    t_cross = first_crossing(frame, "phi", np.radians(20.0))
    assert t_cross is not None and t_cross < 10.0


def test_state_kick_impulse(hover_model):
    frame = impulse_response(hover_model, "q", 0.01, 1.0, magnitude=0.5)
    assert frame["theta"].iloc[-1] == pytest.approx(0.5, rel=1e-9)


def test_errata_report_lists_unreproducible_entries(hover_model):
    report = errata_report(hover_model)
    cells = {(e["row"], e["col"]) for e in report["a_entries"]}
    assert cells == {("w_dot", "phi"), ("p_dot", "q"), ("q_dot", "p")}
    assert report["b_pattern_match"] is True
    assert len(report["b_entries"]) == 4


def test_report_order_and_matrix_file(tmp_path, hover_model):
    view = hover_model.reordered(REPORT_ORDER)
    assert view.state_order[:3] == ("x", "y", "z")
    assert view.entry("u", "theta") == hover_model.entry("u", "theta")
    path = write_matrices(tmp_path / "hover.txt", hover_model)
    a, b, order = read_matrices(path)
    assert order == REPORT_ORDER
    np.testing.assert_allclose(a, view.a, rtol=1e-9)
    np.testing.assert_allclose(b, view.b, rtol=1e-9)


def test_singular_trim_propagates():
    with pytest.raises(SingularAttitude):
        linearize_at(BodyState(theta=np.pi / 2), ControlEfforts(P.mass * P.g), P)


def test_model_rejects_non_finite_entries():
    a = np.zeros((12, 12))
    a[0, 0] = np.nan
    with pytest.raises(ValueError):
        LinearModel(a, np.zeros((12, 4)))


def test_state_index_matches_internal_order(hover_model):
    assert hover_model.state_order[STATE_INDEX["phi"]] == "phi"


def test_failed_matrix_write_keeps_previous_file(tmp_path, hover_model, monkeypatch):
    path = write_matrices(tmp_path / "hover.txt", hover_model)
    before = path.read_text()

    def broken_savetxt(fh, *args, **kwargs):
        fh.write("0 0 0")
        raise OSError("disk full")

    monkeypatch.setattr(np, "savetxt", broken_savetxt)
    with pytest.raises(OSError):
        write_matrices(path, LinearModel(np.zeros((12, 12)), np.zeros((12, 4))))
    assert path.read_text() == before
    assert sorted(p.name for p in tmp_path.iterdir()) == ["hover.txt"]
