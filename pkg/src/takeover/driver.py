"""Driver tracking preferences as a Q matrix, plus inverse-LQ estimation.

A driver is modeled as a single-player LQ tracker with diagonal state
penalty Q and fixed control penalty R. ``estimate_q`` recovers Q from a
logged (state, reference, torque) sequence by fitting the stationary
feedback law u = -R^{-1} B' P(Q) x_err in the least-squares sense;
``synth_driver_log`` generates such logs for validation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import solve_continuous_are
from scipy.optimize import least_squares

from .errors import ConfigError, DivergenceError, EstimationError
from .scenario import Scenario, reference_state
from .vehicle import LinearModel, N_STATES, discretize, step_dynamics

LOG_HEADER = "t,beta,psidot,psi,y,delta,deltadot,yref,psiref,u"
LOG_INTERVAL = 0.1       # s, fixed sampling of driving logs
MIN_LOG_SAMPLES = 10
Q_FLOOR = 1e-8           # keeps estimated Q strictly positive definite

# Synthetic driver population: two behavior groups seen in takeover studies.
# "Vigorous" drivers overcorrect -- they weight lateral deviation far above
# the automation's penalty of 5 and steer hot. "Hesitant" drivers track
# weakly and resist wheel motion (a centering weight on the steering angle),
# the rational proxy for a driver who has not re-engaged with the task.
# Steering-rate weights are excluded: they make the backward Euler Riccati
# recursion stiff at the 0.01 s step (high-gain input channel).
VIGOROUS_FRACTION = 0.8
VIGOROUS_Q_Y_RANGE = (15.0, 60.0)
HESITANT_Q_Y_RANGE = (0.05, 0.3)
HESITANT_Q_DELTA_RANGE = (0.3, 2.0)
SYNTH_Q_PSI_RANGE = (0.05, 0.5)


@dataclass(frozen=True)
class DriverProfile:
    """Per-driver maximum tracking weight and control penalty.

    The default is a vigorous overcorrector (lateral weight well above the
    automation's 5), matching the takeover behavior the strategy comparison
    is built around.
    """

    q_max: np.ndarray = field(
        default_factory=lambda: np.diag([0.0, 0.0, 0.2, 30.0, 0.0, 0.0])
    )
    r: float = 1.0
    label: str = "driver"

    def __post_init__(self):
        q = np.asarray(self.q_max, dtype=float)
        if q.shape != (N_STATES, N_STATES):
            raise ConfigError(f"driver Q must be 6x6, got {q.shape}")
        if np.max(np.abs(q - q.T)) > 1e-9 or np.linalg.eigvalsh(q).min() < -1e-9:
            raise ConfigError("driver Q must be symmetric positive semidefinite")
        if not self.r > 0:
            raise ConfigError(f"driver R must be positive, got {self.r!r}")
        object.__setattr__(self, "q_max", q)

    @property
    def q_diag(self) -> np.ndarray:
        return np.diag(self.q_max)

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        payload = {
            "label": self.label,
            "r": self.r,
            "q_diag": [float(v) for v in self.q_diag],
        }
        path.write_text(json.dumps(payload, indent=2) + "\n")
        return path

    @classmethod
    def load(cls, path: str | Path) -> "DriverProfile":
        payload = json.loads(Path(path).read_text())
        return cls(
            q_max=np.diag(payload["q_diag"]),
            r=float(payload["r"]),
            label=str(payload["label"]),
        )


@dataclass(frozen=True)
class DrivingLog:
    """Uniformly sampled (t, state, reference, torque) sequence."""

    t: np.ndarray
    x: np.ndarray      # (N, 6)
    x_ref: np.ndarray  # (N, 6)
    u: np.ndarray      # (N,)

    def __post_init__(self):
        if len(self.t) < MIN_LOG_SAMPLES:
            raise ConfigError(
                f"driving log needs at least {MIN_LOG_SAMPLES} samples, got {len(self.t)}"
            )
        dts = np.diff(self.t)
        if np.max(np.abs(dts - dts[0])) > 1e-9:
            raise ConfigError("driving log sampling interval is not uniform")

    @property
    def interval(self) -> float:
        return float(self.t[1] - self.t[0])


def stationary_gain(model: LinearModel, q: np.ndarray, r: float) -> np.ndarray:
    """Infinite-horizon LQR gain row K = R^{-1} B' P for the driver input."""
    b = model.B_D.reshape(-1, 1)
    p = solve_continuous_are(model.A, b, q, np.array([[r]]))
    return (model.B_D @ p) / r


def synth_driver_log(
    q_true: np.ndarray,
    scenario: Scenario,
    model: LinearModel,
    noise_sigma: float = 0.0,
    interval: float = LOG_INTERVAL,
    seed: int = 0,
    internal_dt: float = 0.01,
) -> DrivingLog:
    """Closed-loop LQR driver tracking the scenario, with torque noise.

    The torque is refreshed (and the noise drawn) once per log sample and
    held over the sample interval; the plant integrates at ``internal_dt``.
    """
    if noise_sigma < 0:
        raise ConfigError("noise sigma must be nonnegative")
    q_true = np.asarray(q_true, dtype=float)
    if np.linalg.eigvalsh(0.5 * (q_true + q_true.T)).min() < -1e-9:
        raise ConfigError("true Q must be positive semidefinite")

    if np.any(np.abs(q_true) > 0):
        gain = stationary_gain(model, q_true, 1.0)
    else:
        gain = np.zeros(N_STATES)  # zero weight: driver applies no torque

    substeps = round(interval / internal_dt)
    if substeps < 1 or abs(interval - substeps * internal_dt) > 1e-12:
        raise ConfigError("log interval must be an integer multiple of internal_dt")
    n_samples = int(np.floor(scenario.duration / interval)) + 1

    rng = np.random.default_rng(seed)
    dm = discretize(model, internal_dt)
    x = np.zeros(N_STATES)
    t_out = np.arange(n_samples) * interval
    x_out = np.zeros((n_samples, N_STATES))
    ref_out = np.zeros((n_samples, N_STATES))
    u_out = np.zeros(n_samples)

    for k in range(n_samples):
        t = t_out[k]
        x_ref = reference_state(scenario, t)
        u = float(-gain @ (x - x_ref))
        if noise_sigma > 0:
            u += rng.normal(0.0, noise_sigma)
        x_out[k] = x
        ref_out[k] = x_ref
        u_out[k] = u
        if k == n_samples - 1:
            break
        for _ in range(substeps):
            x = step_dynamics(x, u, 0.0, dm)
        if not np.all(np.abs(x) < 1e6):
            raise DivergenceError(f"synthetic driver loop diverged at t={t:.1f} s")

    return DrivingLog(t=t_out, x=x_out, x_ref=ref_out, u=u_out)


def estimate_q(
    log: DrivingLog,
    model: LinearModel,
    r: float = 1.0,
    label: str = "estimated",
    max_iter: int = 500,
) -> DriverProfile:
    """Fit a diagonal Q to a driving log by inverse LQ regression.

    Minimizes sum_k | u_k + R^{-1} B' P(Q) x_err_k |^2. The torque residual
    is first reduced algebraically: with Khat the unrestricted least-squares
    gain and G = x_err' x_err, the objective equals
    |residual(Khat)|^2 + (K(Q)-Khat)' G (K(Q)-Khat), so only a 6-residual
    problem in the diagonal of Q remains. Diagonal entries are parameterized
    as squares (plus a 1e-8 floor) so the result is always positive definite.
    Raises EstimationError for logs with no tracking-error excitation or when
    the optimizer fails to converge.
    """
    if not r > 0:
        raise ConfigError(f"R must be positive, got {r!r}")
    x_err = log.x - log.x_ref
    if np.max(np.abs(x_err)) < 1e-12:
        raise EstimationError(
            "driving log has zero tracking error everywhere; Q is unidentifiable"
        )

    gain_hat, *_ = np.linalg.lstsq(x_err, -log.u, rcond=None)
    gram = x_err.T @ x_err
    eigval, eigvec = np.linalg.eigh(gram)
    half = np.sqrt(np.clip(eigval, 0.0, None))[:, None] * eigvec.T

    def residuals(d: np.ndarray) -> np.ndarray:
        q = np.diag(d**2 + Q_FLOOR)
        return half @ (stationary_gain(model, q, r) - gain_hat)

    result = least_squares(
        residuals,
        x0=np.ones(N_STATES),
        method="trf",
        x_scale="jac",
        ftol=1e-8,
        xtol=1e-12,
        gtol=1e-12,
        max_nfev=max_iter * (N_STATES + 1),
    )
    if not result.success:
        raise EstimationError(
            f"inverse-LQ fit did not converge: {result.message} "
            f"(residual norm {np.linalg.norm(result.fun):.3e})"
        )
    q_hat = np.diag(result.x**2 + Q_FLOOR)
    return DriverProfile(q_max=q_hat, r=r, label=label)


def fit_residual(profile: DriverProfile, log: DrivingLog, model: LinearModel) -> float:
    """RMS torque residual of a profile against a log."""
    gain = stationary_gain(model, profile.q_max + Q_FLOOR * np.eye(N_STATES), profile.r)
    res = log.u + (log.x - log.x_ref) @ gain
    return float(np.sqrt(np.mean(res**2)))


def _log_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))


def sample_profiles(
    count: int,
    seed: int,
    vigorous_fraction: float = VIGOROUS_FRACTION,
    q_psi_range: tuple[float, float] = SYNTH_Q_PSI_RANGE,
    vigorous_q_y_range: tuple[float, float] = VIGOROUS_Q_Y_RANGE,
    hesitant_q_y_range: tuple[float, float] = HESITANT_Q_Y_RANGE,
    hesitant_q_delta_range: tuple[float, float] = HESITANT_Q_DELTA_RANGE,
) -> list[DriverProfile]:
    """Synthetic driver population with randomized diagonal Q weights.

    The first ``round((1 - vigorous_fraction) * count)`` drivers are hesitant
    (weak lateral weight plus a steering-centering weight), the rest vigorous
    overcorrectors; weights are log-uniform within the documented ranges.
    """
    if count < 1:
        raise ConfigError("driver count must be at least 1")
    if not 0.0 <= vigorous_fraction <= 1.0:
        raise ConfigError("vigorous_fraction must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    n_hesitant = round((1.0 - vigorous_fraction) * count)
    profiles = []
    for i in range(count):
        q = np.zeros((N_STATES, N_STATES))
        q[2, 2] = _log_uniform(rng, *q_psi_range)
        if i < n_hesitant:
            q[3, 3] = _log_uniform(rng, *hesitant_q_y_range)
            q[4, 4] = _log_uniform(rng, *hesitant_q_delta_range)
            kind = "hesitant"
        else:
            q[3, 3] = _log_uniform(rng, *vigorous_q_y_range)
            kind = "vigorous"
        profiles.append(DriverProfile(q_max=q, r=1.0, label=f"{kind}{i:02d}"))
    return profiles


def identification_scenario(
    duration: float = 600.0,
    speed: float = 120.0 / 3.6,
    ramp_s: float = 0.2,
    hold_s: float = 1.3,
    offset: float = 3.75,
) -> Scenario:
    """Persistently exciting zigzag reference for inverse-LQ validation.

    Heading-weight information in torque data is weak (the gain barely moves
    with the psi weight), so recovering it under noise needs long logs with
    sharp heading transients; this maneuver provides both.
    """
    times, ys = [0.0], [0.0]
    t, y, up = 0.0, 0.0, True
    while t + hold_s + ramp_s < duration:
        t += hold_s
        times.append(t)
        ys.append(y)
        y = offset if up else 0.0
        t += ramp_s
        times.append(t)
        ys.append(y)
        up = not up
    times.append(duration)
    ys.append(y)
    return Scenario(
        kind="custom",
        duration=duration,
        speed=speed,
        table=(np.asarray(times), np.asarray(ys)),
    )


def write_driving_log_csv(log: DrivingLog, path: str | Path) -> Path:
    path = Path(path)
    cols = np.column_stack([log.t, log.x, log.x_ref[:, 3], log.x_ref[:, 2], log.u])
    with path.open("w", newline="\n") as fh:
        fh.write(LOG_HEADER + "\n")
        for row in cols:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    return path


def read_driving_log_csv(path: str | Path) -> DrivingLog:
    """Header-name addressed ingestion of the DrivingLog CSV schema."""
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip()
    names = header.split(",")
    expected = LOG_HEADER.split(",")
    if set(names) != set(expected):
        missing = sorted(set(expected) - set(names))
        extra = sorted(set(names) - set(expected))
        raise ConfigError(
            f"{path}: driving log columns mismatch (missing {missing}, "
            f"unexpected {extra})"
        )
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as exc:
        raise ConfigError(f"{path}: malformed driving log: {exc}") from exc
    if data.size == 0:
        raise ConfigError(f"{path}: driving log has no samples")
    col = {name: data[:, i] for i, name in enumerate(names)}
    x = np.column_stack(
        [col["beta"], col["psidot"], col["psi"], col["y"], col["delta"], col["deltadot"]]
    )
    x_ref = np.zeros((data.shape[0], N_STATES))
    x_ref[:, 3] = col["yref"]
    x_ref[:, 2] = col["psiref"]
    return DrivingLog(t=col["t"], x=x, x_ref=x_ref, u=col["u"])
