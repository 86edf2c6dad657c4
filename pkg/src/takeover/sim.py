"""Phase-structured takeover simulation with receding-horizon game solves.

Each 0.01 s step: set the driver share alpha from the phase logic and the
configured transition law, scale both players' Q matrices, re-solve the
coupled Riccati recursion over the preview horizon with those weights held
constant, apply the first-step feedback torques, and propagate the plant.
"""

from __future__ import annotations

import hashlib
import json
import logging
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import transition as tr
from .driver import DriverProfile
from .errors import ConfigError, DivergenceError
from .game import GameWeights, solve_coupled_riccati, steps_in_horizon
from .scenario import Scenario, reference_state
from .vehicle import (
    LATERAL_ACCEL_LIMIT,
    N_STATES,
    VehicleParams,
    build_system_matrices,
    discretize,
    lateral_acceleration,
    step_dynamics,
)

log = logging.getLogger(__name__)

RUNLOG_HEADER = (
    "t,beta,psidot,psi,y,delta,deltadot,yref,psiref,"
    "alpha_d,alpha_a,td,ta,ey,epsi"
)

# Hard sanity bounds: ~10x the reference scale of the maneuvers.
BETA_BOUND = 0.2   # rad
Y_BOUND = 8.0      # m

TERMINAL_POLICIES = ("current", "zero")


@dataclass(frozen=True)
class AdasWeights:
    """ADAS tracking preference: diagonal state penalty and control penalty."""

    q_max: np.ndarray = field(
        default_factory=lambda: np.diag([0.0, 0.0, 0.0, 5.0, 0.0, 0.0])
    )
    r: float = 1.0


@dataclass(frozen=True)
class RunConfig:
    vehicle: VehicleParams
    scenario: Scenario
    transition: tr.TransitionSpec
    driver: DriverProfile
    adas: AdasWeights = field(default_factory=AdasWeights)
    horizon: float = 1.5
    dt: float = 0.01
    duration: float = 10.0
    terminal_policy: str = "current"
    discretization: str = "euler"

    def __post_init__(self):
        steps_in_horizon(self.horizon, self.dt)  # validates integrality
        if self.duration <= 0 or round(self.duration / self.dt) < 1:
            raise ConfigError(f"duration {self.duration!r} too short for dt {self.dt!r}")
        if self.duration < self.transition.t_end:
            raise ConfigError(
                f"duration {self.duration} must reach the transition end "
                f"{self.transition.t_end}"
            )
        if self.terminal_policy not in TERMINAL_POLICIES:
            raise ConfigError(
                f"terminal_policy must be one of {TERMINAL_POLICIES}, "
                f"got {self.terminal_policy!r}"
            )

    def config_hash(self) -> str:
        def default(o):
            if isinstance(o, np.ndarray):
                return o.tolist()
            if hasattr(o, "__dict__"):
                return {k: v for k, v in o.__dict__.items()}
            return repr(o)

        blob = json.dumps(self.__dict__, default=default, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


@dataclass
class RunLog:
    """Full time-indexed record of one takeover run."""

    t: np.ndarray
    x: np.ndarray        # (n+1, 6) in state order
    x_ref: np.ndarray    # (n+1, 6)
    alpha_d: np.ndarray
    alpha_a: np.ndarray
    td: np.ndarray
    ta: np.ndarray
    ey: np.ndarray
    epsi: np.ndarray
    scenario: str = "custom"
    strategy: str = "unknown"
    driver: str = "driver"
    config_hash: str = ""

    def __len__(self) -> int:
        return len(self.t)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    def run_name(self) -> str:
        return f"{self.scenario}_{self.strategy}_{self.driver}"

    def __eq__(self, other) -> bool:
        if not isinstance(other, RunLog):
            return NotImplemented
        arrays = ("t", "x", "x_ref", "alpha_d", "alpha_a", "td", "ta", "ey", "epsi")
        return all(
            np.array_equal(getattr(self, a), getattr(other, a)) for a in arrays
        ) and (self.scenario, self.strategy, self.driver) == (
            other.scenario,
            other.strategy,
            other.driver,
        )


def run_takeover(cfg: RunConfig) -> RunLog:
    """Execute one shared-control takeover run and return its full log."""
    model = build_system_matrices(cfg.vehicle)
    dm = discretize(model, cfg.dt, cfg.discretization)
    n_steps = round(cfg.duration / cfg.dt)
    if abs(cfg.duration - n_steps * cfg.dt) > 1e-9:
        raise ConfigError(
            f"duration {cfg.duration!r} is not an integer multiple of dt {cfg.dt!r}"
        )

    n_rows = n_steps + 1
    out = RunLog(
        t=np.arange(n_rows) * cfg.dt,
        x=np.zeros((n_rows, N_STATES)),
        x_ref=np.zeros((n_rows, N_STATES)),
        alpha_d=np.zeros(n_rows),
        alpha_a=np.zeros(n_rows),
        td=np.zeros(n_rows),
        ta=np.zeros(n_rows),
        ey=np.zeros(n_rows),
        epsi=np.zeros(n_rows),
        scenario=cfg.scenario.kind,
        strategy=cfg.transition.kind,
        driver=cfg.driver.label,
        config_hash=cfg.config_hash(),
    )

    q_d_max = cfg.driver.q_max
    q_a_max = cfg.adas.q_max
    zero_s = np.zeros((N_STATES, N_STATES))
    x = np.zeros(N_STATES)
    warned_envelope = False

    for k in range(n_rows):
        t = k * cfg.dt
        x_ref = reference_state(cfg.scenario, min(t, cfg.scenario.duration))
        x_err = x - x_ref
        err = tr.ErrorSignals(cross_track=float(x_err[3]), heading=float(x_err[2]))

        a_d = tr.alpha(cfg.transition, t, err)
        a_a = 1.0 - a_d
        q_d, q_a = tr.blend_weights(a_d, q_d_max, q_a_max)
        if cfg.terminal_policy == "current":
            s_d, s_a = q_d, q_a
        else:
            s_d, s_a = zero_s, zero_s

        try:
            sol_d, sol_a = solve_coupled_riccati(
                model,
                GameWeights(Q=q_d, R=cfg.driver.r, S=s_d),
                GameWeights(Q=q_a, R=cfg.adas.r, S=s_a),
                cfg.horizon,
                cfg.dt,
            )
        except DivergenceError as exc:
            wrapped = DivergenceError(
                f"Riccati solve failed at simulation step {k} (t={t:.2f} s): {exc}",
                step=k,
            )
            wrapped.partial_log = _truncate(out, k)
            raise wrapped from exc

        torque_d = sol_d.feedback_torque(0, x_err)
        torque_a = sol_a.feedback_torque(0, x_err)

        out.x[k] = x
        out.x_ref[k] = x_ref
        out.alpha_d[k] = a_d
        out.alpha_a[k] = a_a
        out.td[k] = torque_d
        out.ta[k] = torque_a
        out.ey[k] = x_err[3]
        out.epsi[k] = x_err[2]

        if not warned_envelope:
            a_y = lateral_acceleration(model, x, torque_d, torque_a)
            if abs(a_y) > LATERAL_ACCEL_LIMIT:
                warnings.warn(
                    f"{out.run_name()}: lateral acceleration {a_y:.2f} m/s^2 at "
                    f"t={t:.2f} s exceeds the {LATERAL_ACCEL_LIMIT} m/s^2 model "
                    "validity envelope",
                    RuntimeWarning,
                    stacklevel=2,
                )
                warned_envelope = True

        if k == n_steps:
            break
        try:
            x = step_dynamics(x, torque_d, torque_a, dm)
        except DivergenceError as exc:
            exc.step = k
            exc.partial_log = _truncate(out, k + 1)
            raise
        if abs(x[0]) > BETA_BOUND or abs(x[3]) > Y_BOUND:
            exc = DivergenceError(
                f"state left its sanity bounds at step {k + 1} "
                f"(beta={x[0]:.3f} rad, y={x[3]:.2f} m)",
                step=k + 1,
            )
            exc.partial_log = _truncate(out, k + 1)
            raise exc

    return out


def _truncate(runlog: RunLog, rows: int) -> RunLog:
    """First ``rows`` records of a log (partial log on divergence)."""
    return RunLog(
        t=runlog.t[:rows],
        x=runlog.x[:rows],
        x_ref=runlog.x_ref[:rows],
        alpha_d=runlog.alpha_d[:rows],
        alpha_a=runlog.alpha_a[:rows],
        td=runlog.td[:rows],
        ta=runlog.ta[:rows],
        ey=runlog.ey[:rows],
        epsi=runlog.epsi[:rows],
        scenario=runlog.scenario,
        strategy=runlog.strategy,
        driver=runlog.driver,
        config_hash=runlog.config_hash,
    )


def run_batch(cfgs: list[RunConfig], jobs: int | None = None) -> list:
    """Run several configs; failed runs yield the exception in their slot."""
    if not cfgs:
        raise ConfigError("batch requires at least one run config")
    if jobs is not None and jobs > 1 and len(cfgs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_guarded, cfgs))
    else:
        results = [_run_guarded(cfg) for cfg in cfgs]
    for i, res in enumerate(results):
        if isinstance(res, Exception):
            log.warning("run %d/%d failed: %s", i + 1, len(cfgs), res)
    return results


def _run_guarded(cfg: RunConfig):
    try:
        return run_takeover(cfg)
    except Exception as exc:  # noqa: BLE001 - per-run isolation by contract
        return exc


def write_runlog_csv(runlog: RunLog, path: str | Path) -> Path:
    """Emit the published CSV schema; floats use shortest round-trip repr."""
    path = Path(path)
    cols = np.column_stack(
        [
            runlog.t,
            runlog.x,
            runlog.x_ref[:, 3],
            runlog.x_ref[:, 2],
            runlog.alpha_d,
            runlog.alpha_a,
            runlog.td,
            runlog.ta,
            runlog.ey,
            runlog.epsi,
        ]
    )
    with path.open("w", newline="\n") as fh:
        fh.write(RUNLOG_HEADER + "\n")
        for row in cols:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    return path


def read_runlog_csv(path: str | Path) -> RunLog:
    """Re-ingest a RunLog CSV (header-name addressed); inverse of write."""
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip()
    names = header.split(",")
    expected = set(RUNLOG_HEADER.split(","))
    if set(names) != expected:
        missing = expected - set(names)
        extra = set(names) - expected
        raise ConfigError(
            f"{path}: run log columns mismatch (missing {sorted(missing)}, "
            f"unexpected {sorted(extra)})"
        )
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    col = {name: data[:, i] for i, name in enumerate(names)}

    n_rows = data.shape[0]
    x = np.column_stack(
        [col["beta"], col["psidot"], col["psi"], col["y"], col["delta"], col["deltadot"]]
    )
    x_ref = np.zeros((n_rows, N_STATES))
    x_ref[:, 3] = col["yref"]
    x_ref[:, 2] = col["psiref"]

    stem_parts = path.stem.split("_")
    scenario, strategy, driver = "custom", "unknown", "driver"
    for known in ("double_lane_change", "lane_change", "custom"):
        if path.stem.startswith(known + "_"):
            scenario = known
            rest = path.stem[len(known) + 1 :].split("_", 1)
            strategy = rest[0]
            driver = rest[1] if len(rest) > 1 else driver
            break
    else:
        if len(stem_parts) >= 3:
            scenario, strategy, driver = (
                stem_parts[0],
                stem_parts[1],
                "_".join(stem_parts[2:]),
            )

    return RunLog(
        t=col["t"],
        x=x,
        x_ref=x_ref,
        alpha_d=col["alpha_d"],
        alpha_a=col["alpha_a"],
        td=col["td"],
        ta=col["ta"],
        ey=col["ey"],
        epsi=col["epsi"],
        scenario=scenario,
        strategy=strategy,
        driver=driver,
    )
