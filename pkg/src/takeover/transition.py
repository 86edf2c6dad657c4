"""Control-authority transition functions alpha(t) and weight blending.

``alpha`` is the driver's share: 0 before the transition window (full ADAS),
1 at and after its end (full driver). Inside the window [t_start, t_end) the
selected law applies; every result is clamped to [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

KINDS = ("step", "linear", "cooperative", "sigmoid", "exponential", "adaptive")


@dataclass(frozen=True)
class TransitionSpec:
    """Which alpha(t) law governs authority and its parameters.

    ``t_start == t_end`` is allowed as a degenerate window: the driver share
    jumps 0 -> 1 at that instant (used for full-ADAS runs where the window
    collapses onto the run end).
    """

    kind: str = "adaptive"
    t_start: float = 3.0
    t_end: float = 8.0
    steepness: float = 10.0        # sigmoid k
    rate: float = 4.0              # exponential lambda, > 1
    cross_track_gain: float = 0.5  # adaptive k1, 1/m
    heading_gain: float = 1.0      # adaptive k2, 1/rad
    verbatim_sigmoid: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(
                f"unknown transition kind {self.kind!r}; expected one of {KINDS}"
            )
        if not (np.isfinite(self.t_start) and np.isfinite(self.t_end)):
            raise ConfigError("transition times must be finite")
        if self.t_start > self.t_end:
            raise ConfigError(
                f"transition start {self.t_start} must not exceed end {self.t_end}"
            )
        if self.kind == "exponential" and not self.rate > 1.0:
            raise ConfigError(
                f"exponential transition requires rate > 1, got {self.rate}"
            )
        if self.kind == "adaptive" and (
            self.cross_track_gain < 0 or self.heading_gain < 0
        ):
            raise ConfigError("adaptive gains must be nonnegative")


@dataclass(frozen=True)
class ErrorSignals:
    """Live tracking deviations driving the adaptive law."""

    cross_track: float = 0.0  # eps_y, m
    heading: float = 0.0      # eps_psi, rad


def alpha(spec: TransitionSpec, t: float, err: ErrorSignals | None = None) -> float:
    """Driver authority share in [0, 1] at time t."""
    if t < spec.t_start:
        return 0.0
    if t >= spec.t_end:
        return 1.0
    value = _in_window(spec, t, err if err is not None else ErrorSignals())
    return min(1.0, max(0.0, value))


def _in_window(spec: TransitionSpec, t: float, err: ErrorSignals) -> float:
    span = spec.t_end - spec.t_start
    if spec.kind == "step":
        return 1.0
    if spec.kind == "linear":
        return (t - spec.t_start) / span
    if spec.kind == "cooperative":
        return 0.5
    if spec.kind == "sigmoid":
        if spec.verbatim_sigmoid:
            # formula as published; decreasing in t and not normalized
            mid = (spec.t_end + spec.t_start) / (2.0 * span)
            return 1.0 - 1.0 / (1.0 + math.exp(-spec.steepness * (t - mid)))
        tau = (t - spec.t_start) / span
        return 1.0 / (1.0 + math.exp(-spec.steepness * (tau - 0.5)))
    if spec.kind == "exponential":
        return 1.0 - math.exp(-spec.rate * (t - spec.t_start) / span)
    # adaptive: ADAS assistance grows with the combined tracking deviation
    deviation = abs(
        spec.cross_track_gain * err.cross_track + spec.heading_gain * err.heading
    )
    return 1.0 - min(0.5 + deviation, 1.0)


def blend_weights(
    a: float, q_driver_max: np.ndarray, q_adas_max: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Split tracking authority: Q_D = a Q_D_max, Q_A = (1 - a) Q_A_max."""
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"authority share must lie in [0, 1], got {a!r}")
    return a * q_driver_max, (1.0 - a) * q_adas_max
