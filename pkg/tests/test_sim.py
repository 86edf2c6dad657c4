import warnings

import numpy as np
import pytest

from takeover.driver import DriverProfile
from takeover.errors import ConfigError, DivergenceError
from takeover.game import GameWeights, solve_coupled_riccati
from takeover.metrics import batch_norms, cumulative_error
from takeover.scenario import build_scenario
from takeover.sim import (
    AdasWeights,
    RunConfig,
    read_runlog_csv,
    run_batch,
    run_takeover,
    write_runlog_csv,
)
from takeover.transition import TransitionSpec


def make_config(params, scenario, strategy="cooperative", driver=None, **kw):
    return RunConfig(
        vehicle=params,
        scenario=scenario,
        transition=TransitionSpec(kind=strategy, t_start=3.0, t_end=8.0),
        driver=driver or DriverProfile(),
        adas=AdasWeights(),
        **kw,
    )


@pytest.fixture(scope="module")
def coop_log(params, lane_change):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return run_takeover(make_config(params, lane_change))


def test_log_shape_and_phases(coop_log):
    log = coop_log
    assert len(log) == 1001
    np.testing.assert_allclose(log.alpha_d + log.alpha_a, np.ones(len(log)))
    pre = log.t < 3.0
    post = log.t >= 8.0
    np.testing.assert_array_equal(log.alpha_d[pre], 0.0)
    np.testing.assert_array_equal(log.alpha_d[post], 1.0)
    window = ~pre & ~post
    np.testing.assert_array_equal(log.alpha_d[window], 0.5)


def test_driver_torque_zero_before_window(coop_log, params, double_lane_change):
    np.testing.assert_array_equal(coop_log.td[coop_log.t < 3.0], 0.0)
    # the double lane change starts maneuvering at 2 s: ADAS acts, driver stays silent
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        log = run_takeover(make_config(params, double_lane_change, "step"))
    pre = log.t < 3.0
    np.testing.assert_array_equal(log.td[pre], 0.0)
    assert np.max(np.abs(log.ta[pre])) > 0.0


def test_error_columns_match_states(coop_log):
    np.testing.assert_allclose(coop_log.ey, coop_log.x[:, 3] - coop_log.x_ref[:, 3])
    np.testing.assert_allclose(coop_log.epsi, coop_log.x[:, 2] - coop_log.x_ref[:, 2])


def test_determinism_bitwise(params, lane_change):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        a = run_takeover(make_config(params, lane_change, "adaptive"))
        b = run_takeover(make_config(params, lane_change, "adaptive"))
    assert a == b


def test_full_adas_run_tracks_lane_change(params, lane_change):
    cfg = RunConfig(
        vehicle=params,
        scenario=lane_change,
        transition=TransitionSpec(kind="step", t_start=10.0, t_end=10.0),
        driver=DriverProfile(),
        adas=AdasWeights(),
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        log = run_takeover(cfg)
    assert abs(log.x[-1, 3] - 3.75) < 0.1
    assert np.max(np.abs(log.x[:, 0])) < 0.05
    np.testing.assert_array_equal(log.td[:-1], 0.0)  # driver silent until the flip


def test_stationary_weights_give_stationary_gains(params, lane_change):
    """Cooperative weights are time-invariant; per-step re-solves must agree."""
    cfg = make_config(params, lane_change, "cooperative")
    from takeover.vehicle import build_system_matrices

    model = build_system_matrices(params)
    q_d, q_a = 0.5 * cfg.driver.q_max, 0.5 * cfg.adas.q_max
    sol_d, sol_a = solve_coupled_riccati(
        model,
        GameWeights(Q=q_d, R=1.0, S=q_d),
        GameWeights(Q=q_a, R=1.0, S=q_a),
        cfg.horizon,
        cfg.dt,
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        log = run_takeover(cfg)
    in_window = (log.t >= 3.0) & (log.t < 8.0)
    x_err = (log.x - log.x_ref)[in_window]
    expect_td = -(x_err @ sol_d.gains[0])
    expect_ta = -(x_err @ sol_a.gains[0])
    np.testing.assert_allclose(log.td[in_window], expect_td, atol=1e-9)
    np.testing.assert_allclose(log.ta[in_window], expect_ta, atol=1e-9)


def test_resolving_is_reproducible(model):
    q = np.diag([0.0, 0, 0.5, 2.5, 0, 0])
    w = GameWeights(Q=q, R=1.0, S=q)
    a_d, a_a = solve_coupled_riccati(model, w, w, 1.5, 0.01)
    b_d, b_a = solve_coupled_riccati(model, w, w, 1.5, 0.01)
    np.testing.assert_array_equal(a_d.P, b_d.P)
    np.testing.assert_array_equal(a_a.P, b_a.P)


def test_adaptive_beats_step_for_same_driver(params, double_lane_change):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        logs = [
            run_takeover(make_config(params, double_lane_change, strat))
            for strat in ("step", "adaptive")
        ]
    norms = batch_norms(logs)
    totals = {l.strategy: cumulative_error(l, norms).total for l in logs}
    assert totals["adaptive"] < totals["step"]


def test_six_strategy_batch_orders_step_coop_adaptive(params, double_lane_change):
    strategies = ("step", "linear", "cooperative", "sigmoid", "exponential", "adaptive")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        logs = [
            run_takeover(make_config(params, double_lane_change, strat))
            for strat in strategies
        ]
    assert len(logs) == 6
    norms = batch_norms(logs)
    totals = {l.strategy: cumulative_error(l, norms).total for l in logs}
    assert totals["step"] > totals["cooperative"] > totals["adaptive"]


def test_states_stay_bounded_on_defaults(coop_log):
    assert np.max(np.abs(coop_log.x[:, 0])) < 0.2
    assert np.max(np.abs(coop_log.x[:, 3])) < 8.0


def test_run_aborts_with_partial_log_on_divergence(params, lane_change):
    # steering-rate weight stiffens the backward recursion past its stable step
    bad_driver = DriverProfile(q_max=np.diag([0, 0, 0, 1.0, 0, 5.0]), label="stiff")
    cfg = make_config(params, lane_change, "step", driver=bad_driver)
    with pytest.raises(DivergenceError) as err:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            run_takeover(cfg)
    assert err.value.step is not None
    partial = err.value.partial_log
    assert len(partial) == err.value.step
    np.testing.assert_array_equal(partial.alpha_d, np.zeros(len(partial)))


def test_config_validation():
    params = __import__("takeover.vehicle", fromlist=["VehicleParams"]).VehicleParams()
    scen = build_scenario("lane_change", speed=params.speed)
    with pytest.raises(ConfigError, match="duration"):
        RunConfig(
            vehicle=params,
            scenario=scen,
            transition=TransitionSpec(kind="linear", t_start=3.0, t_end=12.0),
            driver=DriverProfile(),
            duration=10.0,
        )
    with pytest.raises(ConfigError, match="horizon"):
        RunConfig(
            vehicle=params,
            scenario=scen,
            transition=TransitionSpec(kind="linear", t_start=3.0, t_end=8.0),
            driver=DriverProfile(),
            horizon=1.505,
        )
    with pytest.raises(ConfigError, match="terminal"):
        RunConfig(
            vehicle=params,
            scenario=scen,
            transition=TransitionSpec(kind="linear", t_start=3.0, t_end=8.0),
            driver=DriverProfile(),
            terminal_policy="soft",
        )


def test_batch_preserves_order_and_isolates_failures(params, lane_change):
    good = make_config(params, lane_change, "cooperative")
    bad = make_config(
        params,
        lane_change,
        "step",
        driver=DriverProfile(q_max=np.diag([0, 0, 0, 1.0, 0, 5.0]), label="stiff"),
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        results = run_batch([good, bad, good])
    assert len(results) == 3
    assert results[0].strategy == "cooperative"
    assert isinstance(results[1], DivergenceError)
    assert results[2] == results[0]
    with pytest.raises(ConfigError):
        run_batch([])


def test_batch_parallel_matches_serial(params, lane_change):
    cfgs = [
        make_config(params, lane_change, strat)
        for strat in ("step", "cooperative", "adaptive")
    ]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        serial = run_batch(cfgs, jobs=1)
        parallel = run_batch(cfgs, jobs=2)
    for a, b in zip(serial, parallel):
        assert a == b


def test_runlog_csv_round_trip_exact(coop_log, tmp_path):
    path = write_runlog_csv(coop_log, tmp_path / f"{coop_log.run_name()}.csv")
    back = read_runlog_csv(path)
    assert back == coop_log
    assert back.scenario == "lane_change"
    assert back.strategy == "cooperative"


def test_runlog_csv_byte_identical_rerun(params, lane_change, tmp_path):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        a = run_takeover(make_config(params, lane_change, "adaptive"))
        b = run_takeover(make_config(params, lane_change, "adaptive"))
    p1 = write_runlog_csv(a, tmp_path / "one.csv")
    p2 = write_runlog_csv(b, tmp_path / "two.csv")
    assert p1.read_bytes() == p2.read_bytes()


def test_runlog_csv_schema_mismatch(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,beta\n0.0,0.0\n")
    with pytest.raises(ConfigError, match="columns mismatch"):
        read_runlog_csv(bad)


def test_envelope_warning_fires_once(params):
    # aggressive maneuver: sharp ramp at highway speed exceeds 4 m/s^2
    scen = build_scenario("lane_change", speed=params.speed, ramp=(3.0, 4.0))
    cfg = make_config(params, scen, "cooperative")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        run_takeover(cfg)
    envelope = [w for w in caught if "validity envelope" in str(w.message)]
    assert len(envelope) == 1
