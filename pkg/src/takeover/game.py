"""Two-player closed-loop LQ differential game over the tracking error.

Each player i in {driver, adas} minimizes

    J_i = 1/2 xt(T)' S_i xt(T)
        + 1/2 sum_k ( xt_k' Q_i xt_k + u_ik R_i u_ik ) dt

subject to the shared linear plant. Feedback torques follow
u_i = -R_i^{-1} B_i' P_i xt, where the P_i come from the coupled backward
Riccati recursion

    P_i(k-1) = P_i(k) + dt * ( P_i (A - F_j P_j) + (A - F_j P_j)' P_i
                               - P_i F_i P_i + Q_i ),    F_i = B_i B_i'/R_i,

run from the terminal condition P_i(n) = S_i with explicit symmetrization
each step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import ConfigError, DivergenceError
from .vehicle import LinearModel, N_STATES

DIVERGENCE_LIMIT = 1e12
SYMMETRY_TOL = 1e-9
PSD_TOL = 1e-9


def _check_weight_matrix(m: np.ndarray, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.shape != (N_STATES, N_STATES):
        raise ConfigError(f"{name} must be {N_STATES}x{N_STATES}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ConfigError(f"{name} has non-finite entries")
    if np.max(np.abs(m - m.T)) > SYMMETRY_TOL:
        raise ConfigError(f"{name} must be symmetric")
    if np.linalg.eigvalsh(m).min() < -PSD_TOL:
        raise ConfigError(f"{name} must be positive semidefinite")
    return m


@dataclass(frozen=True)
class GameWeights:
    """Per-player (Q, R, S): state penalty, control penalty, terminal penalty."""

    Q: np.ndarray
    R: float
    S: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "Q", _check_weight_matrix(self.Q, "Q"))
        object.__setattr__(self, "S", _check_weight_matrix(self.S, "S"))
        if not (np.isfinite(self.R) and self.R > 0):
            raise ConfigError(f"R must be positive, got {self.R!r}")


@dataclass(frozen=True)
class RiccatiSolution:
    """Backward-solved P sequence for one player plus cached gain rows.

    ``P[k]`` is the value matrix at step k = 0..n; ``gains[k]`` is the row
    vector K_k = R^{-1} B' P_k so the torque is ``-gains[k] @ xt``.
    """

    P: np.ndarray          # (n+1, 6, 6)
    B: np.ndarray          # (6,)
    R: float
    F: np.ndarray = field(init=False)
    gains: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "F", np.outer(self.B, self.B) / self.R)
        object.__setattr__(self, "gains", (self.P @ self.B) / self.R)

    @property
    def n(self) -> int:
        return self.P.shape[0] - 1

    def feedback_torque(self, k: int, x_err: np.ndarray) -> float:
        """Optimal torque -R^{-1} B' P_k xt at step k."""
        if not 0 <= k <= self.n:
            raise ValueError(f"step index {k} outside 0..{self.n}")
        return float(-self.gains[k] @ x_err)


@njit(cache=True)
def _backward_recursion(A, B_d, B_a, R_d, R_a, Q_d, Q_a, S_d, S_a, n, dt):  # pragma: no cover
    # Exploits symmetry of P and the rank-1 structure F_i = B_i B_i'/R_i:
    # with M = P_i (A - F_j P_j), the increment is M + M' - w w'/R_i + Q_i
    # where w = P_i B_i. Only matvecs and one P A product per player remain.
    P_d = np.empty((n + 1, 6, 6))
    P_a = np.empty((n + 1, 6, 6))
    for i in range(6):
        for j in range(6):
            P_d[n, i, j] = 0.5 * (S_d[i, j] + S_d[j, i])
            P_a[n, i, j] = 0.5 * (S_a[i, j] + S_a[j, i])
    wdd = np.empty(6)
    wda = np.empty(6)
    waa = np.empty(6)
    wad = np.empty(6)
    for k in range(n, 0, -1):
        pd = P_d[k]
        pa = P_a[k]
        for i in range(6):
            sdd = sda = saa = sad = 0.0
            for j in range(6):
                sdd += pd[i, j] * B_d[j]
                sda += pd[i, j] * B_a[j]
                saa += pa[i, j] * B_a[j]
                sad += pa[i, j] * B_d[j]
            wdd[i] = sdd
            wda[i] = sda
            waa[i] = saa
            wad[i] = sad
        ok = True
        for i in range(6):
            for j in range(i, 6):
                md_ij = md_ji = ma_ij = ma_ji = 0.0
                for l in range(6):
                    md_ij += pd[i, l] * A[l, j]
                    md_ji += pd[j, l] * A[l, i]
                    ma_ij += pa[i, l] * A[l, j]
                    ma_ji += pa[j, l] * A[l, i]
                md_ij -= wda[i] * waa[j] / R_a
                md_ji -= wda[j] * waa[i] / R_a
                ma_ij -= wad[i] * wdd[j] / R_d
                ma_ji -= wad[j] * wdd[i] / R_d
                nd = pd[i, j] + dt * (md_ij + md_ji - wdd[i] * wdd[j] / R_d + Q_d[i, j])
                na = pa[i, j] + dt * (ma_ij + ma_ji - waa[i] * waa[j] / R_a + Q_a[i, j])
                P_d[k - 1, i, j] = nd
                P_d[k - 1, j, i] = nd
                P_a[k - 1, i, j] = na
                P_a[k - 1, j, i] = na
                if not (np.isfinite(nd) and np.isfinite(na)):
                    ok = False
                elif abs(nd) > DIVERGENCE_LIMIT or abs(na) > DIVERGENCE_LIMIT:
                    ok = False
        if not ok:
            return P_d, P_a, k - 1
    return P_d, P_a, -1


def solve_coupled_riccati(
    model: LinearModel,
    w_driver: GameWeights,
    w_adas: GameWeights,
    horizon: float,
    dt: float,
) -> tuple[RiccatiSolution, RiccatiSolution]:
    """Backward coupled Riccati recursion over ``horizon`` seconds.

    Returns (driver solution, adas solution) with P sequences of length
    n + 1 where n = horizon/dt (must be integral).
    """
    n = steps_in_horizon(horizon, dt)
    P_d, P_a, blew_at = _backward_recursion(
        np.ascontiguousarray(model.A),
        np.ascontiguousarray(model.B_D),
        np.ascontiguousarray(model.B_A),
        w_driver.R,
        w_adas.R,
        np.ascontiguousarray(w_driver.Q),
        np.ascontiguousarray(w_adas.Q),
        np.ascontiguousarray(w_driver.S),
        np.ascontiguousarray(w_adas.S),
        n,
        dt,
    )
    if blew_at >= 0:
        raise DivergenceError(
            "coupled Riccati recursion diverged (entry above "
            f"{DIVERGENCE_LIMIT:g}) at step {blew_at}; horizon too long or "
            "weights infeasible",
            step=blew_at,
        )
    return (
        RiccatiSolution(P=P_d, B=np.asarray(model.B_D, dtype=float), R=w_driver.R),
        RiccatiSolution(P=P_a, B=np.asarray(model.B_A, dtype=float), R=w_adas.R),
    )


def steps_in_horizon(horizon: float, dt: float) -> int:
    """n = horizon/dt, validated to be a positive integer."""
    if not (np.isfinite(dt) and dt > 0):
        raise ConfigError(f"dt must be positive, got {dt!r}")
    n = round(horizon / dt)
    if n < 1 or abs(horizon - n * dt) > 1e-9:
        raise ConfigError(
            f"horizon {horizon!r} is not a positive integer multiple of dt {dt!r}"
        )
    return n


def cost_of_run(log, weights: GameWeights, player: str, alpha_schedule=None) -> float:
    """Quadratic cost of a logged run for one player.

    The state penalty actually applied at step k is alpha_k * weights.Q with
    alpha_k taken from the log (the player's authority share), or from
    ``alpha_schedule`` when given. The last log row carries only the
    terminal cost.
    """
    if player not in ("driver", "adas"):
        raise ValueError(f"player must be 'driver' or 'adas', got {player!r}")
    n_rows = len(log.t)
    if n_rows < 2:
        raise ValueError("log must contain at least two rows")
    dts = np.diff(log.t)
    if np.max(np.abs(dts - dts[0])) > 1e-9:
        raise ValueError("log sampling interval is not uniform")
    dt = float(dts[0])

    if alpha_schedule is None:
        alpha = log.alpha_d if player == "driver" else log.alpha_a
    else:
        alpha = np.asarray(alpha_schedule, dtype=float)
        if alpha.shape[0] != n_rows:
            raise ValueError(
                f"alpha schedule length {alpha.shape[0]} != log length {n_rows}"
            )
    u = log.td if player == "driver" else log.ta

    x_err = log.x - log.x_ref
    state_quad = np.einsum("ki,ij,kj->k", x_err, weights.Q, x_err)
    stage = 0.5 * (alpha[:-1] * state_quad[:-1] + weights.R * u[:-1] ** 2) * dt
    terminal = 0.5 * x_err[-1] @ weights.S @ x_err[-1]
    return float(stage.sum() + terminal)
