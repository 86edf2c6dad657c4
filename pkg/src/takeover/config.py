"""YAML run-config ingestion with field-qualified validation errors.

One file with nested sections: vehicle, scenario, transition, driver, adas,
sim, and (for the batch command) batch. Speeds are given in km/h, times in
seconds, angles in radians; conversion happens here.
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path

import numpy as np
import yaml

from . import scenario as sc
from .driver import DriverProfile, sample_profiles
from .errors import ConfigError
from .sim import AdasWeights, RunConfig
from .transition import TransitionSpec
from .vehicle import N_STATES, VehicleParams

DEFAULT_STRATEGIES = ("step", "linear", "cooperative", "sigmoid", "exponential", "adaptive")


def _section(tree: dict, name: str) -> dict:
    value = tree.get(name, {})
    if value is None:
        value = {}
    if not isinstance(value, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    return value


def _num(section: dict, sec_name: str, key: str, default=None) -> float:
    value = section.get(key, default)
    if value is None:
        raise ConfigError(f"{sec_name}.{key}: required field missing")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{sec_name}.{key}: expected a number, got {value!r}")
    return float(value)


def _weight_matrix(section: dict, sec_name: str) -> np.ndarray | None:
    """Diagonal 6-vector under ``q_diag`` or row-major 36-list under ``q_full``."""
    has_diag = "q_diag" in section
    has_full = "q_full" in section
    if has_diag and has_full:
        raise ConfigError(f"{sec_name}: give q_diag or q_full, not both")
    if has_full:
        entries = section["q_full"]
        if not isinstance(entries, list) or len(entries) != N_STATES * N_STATES:
            raise ConfigError(f"{sec_name}.q_full: expected {N_STATES * N_STATES} entries")
        return np.asarray(entries, dtype=float).reshape(N_STATES, N_STATES)
    if has_diag:
        entries = section["q_diag"]
        if not isinstance(entries, list) or len(entries) != N_STATES:
            raise ConfigError(f"{sec_name}.q_diag: expected {N_STATES} entries")
        return np.diag(np.asarray(entries, dtype=float))
    return None


def load_tree(path: str | Path) -> dict:
    path = Path(path)
    try:
        tree = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: YAML parse error: {exc}") from exc
    if tree is None:
        tree = {}
    if not isinstance(tree, dict):
        raise ConfigError(f"{path}: top level must be a mapping of sections")
    return tree


def vehicle_from(tree: dict) -> VehicleParams:
    section = _section(tree, "vehicle")
    kwargs = {}
    fields = (
        "mass",
        "yaw_inertia",
        "dist_front",
        "dist_rear",
        "cornering_front",
        "cornering_rear",
        "steering_ratio",
        "steering_inertia",
        "steering_stiffness",
        "steering_damping",
    )
    for name in fields:
        if name in section:
            kwargs[name] = _num(section, "vehicle", name)
    if "speed_kmh" in section:
        kwargs["speed"] = _num(section, "vehicle", "speed_kmh") / 3.6
    try:
        return VehicleParams(**kwargs)
    except ConfigError:
        raise
    except TypeError as exc:
        raise ConfigError(f"vehicle: {exc}") from exc


def scenario_from(tree: dict, speed: float, base_dir: Path | None = None) -> sc.Scenario:
    section = _section(tree, "scenario")
    kind = section.get("kind", "lane_change")
    overrides: dict = {"speed": speed}
    if "offset" in section:
        overrides["offset"] = _num(section, "scenario", "offset")
    if "duration" in section:
        overrides["duration"] = _num(section, "scenario", "duration")
    for key, target in (("ramp", "ramp"), ("return_ramp", "return_ramp")):
        if key in section:
            pair = section[key]
            if not isinstance(pair, list) or len(pair) != 2:
                raise ConfigError(f"scenario.{key}: expected [start, end]")
            overrides[target] = (float(pair[0]), float(pair[1]))
    if kind == "custom":
        table_path = section.get("table")
        if not table_path:
            raise ConfigError("scenario.table: required for custom scenarios")
        table_path = Path(table_path)
        if base_dir is not None and not table_path.is_absolute():
            table_path = base_dir / table_path
        overrides["table"] = sc.load_reference_table(table_path)
    try:
        return sc.build_scenario(kind, **overrides)
    except ConfigError as exc:
        raise ConfigError(f"scenario: {exc}") from exc


def transition_from(tree: dict, strategy: str | None = None, verbatim_sigmoid=False) -> TransitionSpec:
    section = _section(tree, "transition")
    kwargs = {
        "kind": strategy or section.get("kind", "adaptive"),
        "verbatim_sigmoid": bool(section.get("verbatim_sigmoid", verbatim_sigmoid)),
    }
    for cfg_key, field_name in (
        ("start", "t_start"),
        ("end", "t_end"),
        ("steepness", "steepness"),
        ("rate", "rate"),
        ("cross_track_gain", "cross_track_gain"),
        ("heading_gain", "heading_gain"),
    ):
        if cfg_key in section:
            kwargs[field_name] = _num(section, "transition", cfg_key)
    try:
        return TransitionSpec(**kwargs)
    except ConfigError as exc:
        raise ConfigError(f"transition: {exc}") from exc


def driver_from(tree: dict) -> DriverProfile:
    section = _section(tree, "driver")
    q = _weight_matrix(section, "driver")
    kwargs = {}
    if q is not None:
        kwargs["q_max"] = q
    if "r" in section:
        kwargs["r"] = _num(section, "driver", "r")
    if "label" in section:
        kwargs["label"] = str(section["label"])
    try:
        return DriverProfile(**kwargs)
    except ConfigError as exc:
        raise ConfigError(f"driver: {exc}") from exc


def adas_from(tree: dict) -> AdasWeights:
    section = _section(tree, "adas")
    kwargs = {}
    q = _weight_matrix(section, "adas")
    if q is not None:
        kwargs["q_max"] = q
    if "r" in section:
        kwargs["r"] = _num(section, "adas", "r")
    try:
        return AdasWeights(**kwargs)
    except ConfigError as exc:
        raise ConfigError(f"adas: {exc}") from exc


def run_config_from(
    tree: dict,
    strategy: str | None = None,
    verbatim_sigmoid: bool = False,
    base_dir: Path | None = None,
) -> RunConfig:
    vehicle = vehicle_from(tree)
    sim_section = _section(tree, "sim")
    duration = _num(sim_section, "sim", "duration", 10.0)
    scenario = scenario_from(tree, vehicle.speed, base_dir)
    if scenario.duration < duration:
        scenario = replace(scenario, duration=duration)
    terminal = sim_section.get("terminal", "current")
    discretization = sim_section.get("discretization", "euler")
    try:
        return RunConfig(
            vehicle=vehicle,
            scenario=scenario,
            transition=transition_from(tree, strategy, verbatim_sigmoid),
            driver=driver_from(tree),
            adas=adas_from(tree),
            horizon=_num(sim_section, "sim", "horizon", 1.5),
            dt=_num(sim_section, "sim", "step", 0.01),
            duration=duration,
            terminal_policy=terminal,
            discretization=discretization,
        )
    except ConfigError:
        raise


def batch_plan(
    tree: dict,
    seed: int | None = None,
    strategy: str | None = None,
    verbatim_sigmoid: bool = False,
    base_dir: Path | None = None,
) -> list[RunConfig]:
    """Cross product of batch strategies x scenarios x drivers."""
    base = run_config_from(tree, verbatim_sigmoid=verbatim_sigmoid, base_dir=base_dir)
    section = _section(tree, "batch")

    strategies = section.get("strategies", list(DEFAULT_STRATEGIES))
    if strategy is not None:
        strategies = [strategy]
    if not isinstance(strategies, list) or not strategies:
        raise ConfigError("batch.strategies: expected a nonempty list")

    scenario_kinds = section.get("scenarios", [base.scenario.kind])
    if not isinstance(scenario_kinds, list) or not scenario_kinds:
        raise ConfigError("batch.scenarios: expected a nonempty list")

    drivers_spec = section.get("drivers", None)
    if drivers_spec is None:
        drivers = [base.driver]
    elif isinstance(drivers_spec, dict):
        count = int(drivers_spec.get("count", 10))
        used_seed = seed if seed is not None else int(drivers_spec.get("seed", 0))
        kwargs = {}
        if "vigorous_fraction" in drivers_spec:
            kwargs["vigorous_fraction"] = float(drivers_spec["vigorous_fraction"])
        for key in (
            "q_psi_range",
            "vigorous_q_y_range",
            "hesitant_q_y_range",
            "hesitant_q_delta_range",
        ):
            if key in drivers_spec:
                pair = drivers_spec[key]
                if not isinstance(pair, list) or len(pair) != 2:
                    raise ConfigError(f"batch.drivers.{key}: expected [low, high]")
                kwargs[key] = (float(pair[0]), float(pair[1]))
        drivers = sample_profiles(count, used_seed, **kwargs)
    elif isinstance(drivers_spec, list):
        drivers = []
        for i, entry in enumerate(drivers_spec):
            if not isinstance(entry, dict):
                raise ConfigError(f"batch.drivers[{i}]: expected a mapping")
            q = _weight_matrix(entry, f"batch.drivers[{i}]")
            extra = {"q_max": q} if q is not None else {}
            drivers.append(
                DriverProfile(
                    r=float(entry.get("r", 1.0)),
                    label=str(entry.get("label", f"driver{i:02d}")),
                    **extra,
                )
            )
    else:
        raise ConfigError("batch.drivers: expected a mapping or a list")

    configs = []
    for kind in scenario_kinds:
        if kind == base.scenario.kind:
            scenario = base.scenario
        else:
            scenario = sc.build_scenario(
                kind, speed=base.vehicle.speed, duration=base.duration
            )
        for strat in strategies:
            spec = transition_from(tree, strat, verbatim_sigmoid)
            for drv in drivers:
                configs.append(
                    replace(base, scenario=scenario, transition=spec, driver=drv)
                )
    return configs
