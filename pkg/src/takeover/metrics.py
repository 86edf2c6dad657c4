"""Cumulative trajectory-error metric and cross-strategy comparison.

The per-run metric sums squared cross-track error, heading error, side-slip
angle, and steering-wheel angle over every logged sample; each term's run
sum is divided by a normalization constant (by default the per-term maximum
over the batch) before the four are added. Steering rate is tracked as an
informational extra, outside the total.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

log = logging.getLogger(__name__)

TERMS = ("ey", "epsi", "beta", "delta")


@dataclass(frozen=True)
class TermNorms:
    """Per-term normalization constants (denominators of the run sums)."""

    ey: float = 1.0
    epsi: float = 1.0
    beta: float = 1.0
    delta: float = 1.0

    def __post_init__(self):
        for name in TERMS:
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ConfigError(f"normalization constant {name} must be positive, got {v!r}")

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in TERMS}


@dataclass(frozen=True)
class ErrorReport:
    """Normalized cumulative-error decomposition of one run."""

    strategy: str
    driver: str
    scenario: str
    total: float
    raw: dict[str, float]
    normalized: dict[str, float]
    norms: TermNorms
    raw_deltadot: float  # informational; not part of the total


def raw_term_sums(runlog) -> dict[str, float]:
    """Per-term raw sums of squares over every sample of a run."""
    return {
        "ey": float(np.sum(runlog.ey**2)),
        "epsi": float(np.sum(runlog.epsi**2)),
        "beta": float(np.sum(runlog.x[:, 0] ** 2)),
        "delta": float(np.sum(runlog.x[:, 4] ** 2)),
    }


def cumulative_error(runlog, norms: TermNorms | None = None) -> ErrorReport:
    """Normalized cumulative trajectory error of one run."""
    norms = norms if norms is not None else TermNorms()
    raw = raw_term_sums(runlog)
    normalized = {name: raw[name] / getattr(norms, name) for name in TERMS}
    return ErrorReport(
        strategy=runlog.strategy,
        driver=runlog.driver,
        scenario=runlog.scenario,
        total=float(sum(normalized.values())),
        raw=raw,
        normalized=normalized,
        norms=norms,
        raw_deltadot=float(np.sum(runlog.x[:, 5] ** 2)),
    )


def batch_norms(runlogs: list) -> TermNorms:
    """Per-term maxima of the raw run sums, so normalized sums lie in [0, 1]."""
    if not runlogs:
        raise ConfigError("batch normalization requires at least one run log")
    sums = [raw_term_sums(rl) for rl in runlogs]
    constants = {}
    for name in TERMS:
        peak = max(s[name] for s in sums)
        if peak == 0.0:
            log.warning("error term %r is identically zero across the batch", name)
            peak = 1.0
        constants[name] = peak
    return TermNorms(**constants)


@dataclass(frozen=True)
class ComparisonRow:
    strategy: str
    mean_total: float
    std_total: float
    pct_vs_step: float
    n_runs: int


@dataclass(frozen=True)
class ComparisonTable:
    """Per-strategy aggregate of ErrorReports, baselined against 'step'."""

    rows: list[ComparisonRow] = field(default_factory=list)

    def to_csv(self) -> str:
        lines = ["strategy,mean_total,std_total,pct_vs_step"]
        for r in self.rows:
            lines.append(f"{r.strategy},{r.mean_total!r},{r.std_total!r},{r.pct_vs_step!r}")
        return "\n".join(lines) + "\n"

    def format(self) -> str:
        header = f"{'strategy':<14}{'mean':>12}{'std':>12}{'vs step %':>12}"
        lines = [header, "-" * len(header)]
        for r in self.rows:
            lines.append(
                f"{r.strategy:<14}{r.mean_total:>12.4f}{r.std_total:>12.4f}"
                f"{r.pct_vs_step:>+12.2f}"
            )
        return "\n".join(lines)

    def by_strategy(self, name: str) -> ComparisonRow:
        for r in self.rows:
            if r.strategy == name:
                return r
        raise KeyError(name)


def compare_strategies(reports: list[ErrorReport]) -> ComparisonTable:
    """Aggregate reports per strategy and compute percent change vs step."""
    if not reports:
        raise ValueError("no reports to compare")
    norm_ids = {id(r.norms) for r in reports}
    if len(norm_ids) > 1:
        values = {tuple(sorted(r.norms.as_dict().items())) for r in reports}
        if len(values) > 1:
            raise ValueError("reports use differing normalization constants")

    grouped: dict[str, list[float]] = {}
    for r in reports:
        grouped.setdefault(r.strategy, []).append(r.total)
    if "step" not in grouped:
        raise ValueError("comparison requires a 'step' baseline strategy")
    baseline = float(np.mean(grouped["step"]))

    rows = []
    for strategy, totals in grouped.items():
        mean = float(np.mean(totals))
        std = float(np.std(totals, ddof=1)) if len(totals) > 1 else 0.0
        pct = 0.0 if strategy == "step" else 100.0 * (mean - baseline) / baseline
        rows.append(
            ComparisonRow(
                strategy=strategy,
                mean_total=mean,
                std_total=std,
                pct_vs_step=pct,
                n_runs=len(totals),
            )
        )
    rows.sort(key=lambda r: -r.mean_total)
    return ComparisonTable(rows=rows)
