"""Reference trajectories for ISO-style lane change maneuvers.

References are time-domain: a piecewise-linear lateral position y_ref(t)
plus the small-angle heading psi_ref = (dy_ref/dt)/v that follows from it.
All other reference components are zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .vehicle import N_STATES

KINDS = ("lane_change", "double_lane_change", "custom")

# ISO 17361 lane change: start the 3.75 m ramp at 3 s, complete by 5 s,
# i.e. before the 7 s time-to-collision of the scenario.
LANE_OFFSET = 3.75
DEFAULT_RAMP = (3.0, 5.0)
# ISO 3888-1 double lane change abstracted into out- and return-ramps.
DEFAULT_OUT_RAMP = (2.0, 3.5)
DEFAULT_RETURN_RAMP = (6.0, 7.5)
DEFAULT_DURATION = 10.0
DEFAULT_SPEED = 120.0 / 3.6


@dataclass(frozen=True)
class Scenario:
    """Reference-path generator parameters for one maneuver."""

    kind: str
    offset: float = LANE_OFFSET
    ramp: tuple[float, float] = DEFAULT_RAMP
    return_ramp: tuple[float, float] | None = None
    duration: float = DEFAULT_DURATION
    speed: float = DEFAULT_SPEED
    # custom kind only: sample points (times, y values), linearly interpolated
    table: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown scenario kind {self.kind!r}")
        if self.duration <= 0:
            raise ConfigError("scenario duration must be positive")
        if self.speed <= 0:
            raise ConfigError("scenario speed must be positive")
        if self.kind == "custom":
            if self.table is None:
                raise ConfigError("custom scenario requires a time/y table")
            times, _ = self.table
            if np.any(np.diff(times) <= 0):
                raise ConfigError("custom table times must be strictly increasing")
            return
        if self.offset <= 0:
            raise ConfigError("lane offset must be positive")
        self._check_ramp(self.ramp, "ramp")
        if self.kind == "double_lane_change":
            if self.return_ramp is None:
                raise ConfigError("double lane change requires a return ramp")
            self._check_ramp(self.return_ramp, "return_ramp")
            if self.return_ramp[0] < self.ramp[1]:
                raise ConfigError(
                    f"return_ramp start {self.return_ramp[0]} precedes "
                    f"ramp end {self.ramp[1]}"
                )

    def _check_ramp(self, ramp: tuple[float, float], name: str):
        start, end = ramp
        if not start < end:
            raise ConfigError(f"{name} end {end} must be after start {start}")
        if start < 0 or end > self.duration:
            raise ConfigError(
                f"{name} [{start}, {end}] must lie within the run [0, {self.duration}]"
            )


def build_scenario(kind: str, **overrides) -> Scenario:
    """Scenario with the documented defaults for the given kind."""
    if kind == "lane_change":
        defaults = dict(ramp=DEFAULT_RAMP, return_ramp=None)
    elif kind == "double_lane_change":
        defaults = dict(ramp=DEFAULT_OUT_RAMP, return_ramp=DEFAULT_RETURN_RAMP)
    elif kind == "custom":
        defaults = {}
    else:
        raise ConfigError(f"unknown scenario kind {kind!r}")
    defaults.update(overrides)
    return Scenario(kind=kind, **defaults)


def load_reference_table(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Two-column t,y CSV (optional header) for custom scenarios."""
    path = Path(path)
    with path.open() as fh:
        first = fh.readline()
    try:
        float(first.split(",")[0])
        skip = 0
    except ValueError:
        skip = 1
    data = np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2)
    if data.shape[1] != 2:
        raise ConfigError(f"reference table {path} must have exactly two columns")
    return data[:, 0], data[:, 1]


def _y_and_slope(s: Scenario, t: float) -> tuple[float, float]:
    if s.kind == "custom":
        times, ys = s.table
        y = float(np.interp(t, times, ys))
        idx = int(np.searchsorted(times, t, side="right")) - 1
        if 0 <= idx < len(times) - 1:
            slope = (ys[idx + 1] - ys[idx]) / (times[idx + 1] - times[idx])
        else:
            slope = 0.0
        return y, float(slope)

    def ramp_value(start, end, y0, y1):
        if t < start:
            return y0, 0.0
        if t >= end:
            return y1, 0.0
        rate = (y1 - y0) / (end - start)
        return y0 + rate * (t - start), rate

    if s.kind == "lane_change" or t < s.return_ramp[0]:
        return ramp_value(s.ramp[0], s.ramp[1], 0.0, s.offset)
    return ramp_value(s.return_ramp[0], s.return_ramp[1], s.offset, 0.0)


def reference_state(s: Scenario, t: float) -> np.ndarray:
    """Reference 6-vector at time t; only y and psi components are nonzero."""
    if not 0.0 <= t <= s.duration:
        raise ValueError(f"t={t} outside the run window [0, {s.duration}]")
    y, slope = _y_and_slope(s, t)
    x_ref = np.zeros(N_STATES)
    x_ref[3] = y
    x_ref[2] = slope / s.speed  # small-angle heading of the reference path
    return x_ref
