import numpy as np
import pytest
from hypothesis import given, strategies as st

from takeover.errors import ConfigError, DivergenceError
from takeover.vehicle import (
    VehicleParams,
    build_system_matrices,
    discretize,
    lateral_acceleration,
    step_dynamics,
)

finite_torque = st.floats(-50.0, 50.0)


def test_matrix_entries_at_defaults(model):
    A = model.A
    # closed-form values for M=1600, J_z=1800, v=120 km/h, l_f=0.9, l_r=1.7,
    # C_f=45e3, C_r=75e3, i_s=16, J_s=0.04, C_s=1.1, D_s=0.3
    assert A[0, 0] == pytest.approx(-2.25, rel=1e-12)
    assert A[0, 1] == pytest.approx(-0.9510625, rel=1e-12)
    assert A[0, 4] == pytest.approx(0.052734375, rel=1e-12)
    assert A[1, 0] == pytest.approx(48.333333333333336, rel=1e-12)
    assert A[1, 1] == pytest.approx(-4.22, rel=1e-12)
    assert A[1, 4] == pytest.approx(1.40625, rel=1e-12)
    assert A[5, 4] == pytest.approx(-27.5, rel=1e-12)
    assert A[5, 5] == pytest.approx(-7.5, rel=1e-12)
    assert A[2, 1] == 1.0 and A[4, 5] == 1.0


def test_input_vectors(model):
    expected = np.zeros(6)
    expected[5] = 25.0  # 1/J_s
    np.testing.assert_array_equal(model.B_D, expected)
    np.testing.assert_array_equal(model.B_A, expected)


def test_lateral_row_couples_beta_and_psi(model):
    v = 120.0 / 3.6
    np.testing.assert_allclose(model.A[3], [v, 0.0, v, 0.0, 0.0, 0.0], rtol=1e-12)


def test_positive_steering_gives_positive_yaw_rate(model):
    # sanity check on the sign convention of the steering column in A
    dm = discretize(model, 0.01)
    x = np.zeros(6)
    for _ in range(50):
        x = step_dynamics(x, 1.0, 0.0, dm)
    assert x[4] > 0.0  # wheel turned
    assert x[1] > 0.0  # vehicle yaws the same way


def test_nonpositive_parameter_rejected():
    with pytest.raises(ConfigError, match="mass"):
        VehicleParams(mass=-1.0)
    with pytest.raises(ConfigError, match="steering_inertia"):
        VehicleParams(steering_inertia=0.0)


def test_speed_conversion_from_kmh():
    p = VehicleParams.with_speed_kmh(120.0)
    assert p.speed == pytest.approx(33.3333333333, rel=1e-10)


def test_discretize_euler(model):
    dm = discretize(model, 0.01)
    assert dm.A_d[5, 5] == pytest.approx(1 - 0.075, rel=1e-12)
    assert dm.B_Dd[5] == pytest.approx(0.25, rel=1e-12)
    tiny = discretize(model, 1e-12)
    np.testing.assert_allclose(tiny.A_d, np.eye(6), atol=1e-9)


def test_discretize_exact_matches_euler_to_first_order(model):
    dt = 1e-4
    eu = discretize(model, dt, "euler")
    ex = discretize(model, dt, "exact")
    # agreement is O(dt^2) with ||A|| ~ 50
    np.testing.assert_allclose(ex.A_d, eu.A_d, atol=1e-4)
    np.testing.assert_allclose(ex.B_Dd, eu.B_Dd, atol=1e-4)


def test_discretize_rejects_bad_input(model):
    with pytest.raises(ConfigError):
        discretize(model, 0.0)
    with pytest.raises(ConfigError):
        discretize(model, 0.01, "magic")


def test_zero_state_zero_input_stays_zero(model):
    dm = discretize(model, 0.01)
    x = np.zeros(6)
    for _ in range(100):
        x = step_dynamics(x, 0.0, 0.0, dm)
    np.testing.assert_array_equal(x, np.zeros(6))


def test_single_torque_step(model):
    dm = discretize(model, 0.01)
    x = step_dynamics(np.zeros(6), 1.0, 0.0, dm)
    np.testing.assert_allclose(x, [0, 0, 0, 0, 0, 0.25], rtol=1e-12)


def test_steering_angle_excitation_hand_computed(model):
    # one Euler step from x = [0,0,0,0,0.1,0]: frozen against the matrix rows
    dm = discretize(model, 0.01)
    x = step_dynamics(np.array([0, 0, 0, 0, 0.1, 0.0]), 0.0, 0.0, dm)
    assert x[0] == pytest.approx(5.2734375e-05, rel=1e-10)
    assert x[1] == pytest.approx(1.40625e-03, rel=1e-10)
    assert x[2] == 0.0 and x[3] == 0.0
    assert x[4] == pytest.approx(0.1, rel=1e-12)
    assert x[5] == pytest.approx(-0.0275, rel=1e-10)


@given(
    x1=st.lists(st.floats(-1, 1), min_size=6, max_size=6),
    x2=st.lists(st.floats(-1, 1), min_size=6, max_size=6),
    t1=finite_torque,
    t2=finite_torque,
    t3=finite_torque,
    t4=finite_torque,
)
def test_superposition(model, x1, x2, t1, t2, t3, t4):
    dm = discretize(model, 0.01)
    a = step_dynamics(np.array(x1), t1, t2, dm)
    b = step_dynamics(np.array(x2), t3, t4, dm)
    both = step_dynamics(np.array(x1) + np.array(x2), t1 + t3, t2 + t4, dm)
    np.testing.assert_allclose(both, a + b, atol=1e-9)


@given(x=st.lists(st.floats(-1, 1), min_size=6, max_size=6), td=finite_torque, ta=finite_torque)
def test_input_symmetry(model, x, td, ta):
    dm = discretize(model, 0.01)
    np.testing.assert_array_equal(
        step_dynamics(np.array(x), td, ta, dm),
        step_dynamics(np.array(x), ta, td, dm),
    )


def test_divergence_names_component(model):
    dm = discretize(model, 0.01)
    with np.errstate(invalid="ignore"):
        with pytest.raises(DivergenceError, match="deltadot"):
            step_dynamics(np.zeros(6), np.inf, 0.0, dm)


def test_small_steering_stays_in_validity_envelope(model):
    # constant small wheel angle: implied lateral acceleration below 4 m/s^2
    dm = discretize(model, 0.01)
    x = np.zeros(6)
    x[4] = 0.05
    worst = 0.0
    for _ in range(500):
        worst = max(worst, abs(lateral_acceleration(model, x, 0.0, 0.0)))
        x_next = dm.A_d @ x
        x_next[4] = 0.05  # hold the wheel
        x_next[5] = 0.0
        x = x_next
    assert worst < 4.0
