"""Batch command-line entry point.

Subcommands: simulate (one run), batch (strategy/scenario/driver cross
product), estimate (driver Q from a driving log), report (re-aggregate a
directory of run CSVs). Exit codes: 0 success, 1 validation error,
2 runtime divergence, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import config as cfg_mod
from . import metrics
from .driver import estimate_q, fit_residual, read_driving_log_csv
from .errors import ConfigError, DivergenceError, EstimationError
from .sim import RunLog, read_runlog_csv, run_batch, run_takeover, write_runlog_csv
from .vehicle import build_system_matrices

log = logging.getLogger("takeover")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_DIVERGENCE = 2
EXIT_IO = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="takeover",
        description="Shared-control takeover simulation and analysis",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="YAML run config")
        p.add_argument(
            "--out",
            default=None,
            help="output directory (default: $TAKEOVER_OUT or ./out)",
        )
        p.add_argument("--seed", type=int, default=None, help="seed for synthetic drivers")

    p_sim = sub.add_parser("simulate", help="run one takeover simulation")
    common(p_sim)
    p_sim.add_argument("--strategy", default=None, help="override transition kind")
    p_sim.add_argument(
        "--verbatim-sigmoid",
        action="store_true",
        help="use the sigmoid formula exactly as published",
    )

    p_batch = sub.add_parser("batch", help="run the configured strategy cross product")
    common(p_batch)
    p_batch.add_argument("--strategy", default=None, help="restrict to one strategy")
    p_batch.add_argument("--verbatim-sigmoid", action="store_true")
    p_batch.add_argument(
        "--jobs",
        type=int,
        default=None,
        help="worker processes (default: available parallelism)",
    )

    p_est = sub.add_parser("estimate", help="estimate driver Q from a driving log")
    common(p_est)
    p_est.add_argument("--log", required=True, help="driving log CSV")
    p_est.add_argument("--label", default="estimated", help="label for the profile")

    p_rep = sub.add_parser("report", help="aggregate run CSVs into comparison tables")
    common(p_rep, needs_config=False)
    p_rep.add_argument("--runs", required=True, help="directory containing run CSVs")
    return parser


def resolve_out_dir(arg: str | None) -> Path:
    out = arg or os.environ.get("TAKEOVER_OUT") or "out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_report_json(report: metrics.ErrorReport, path: Path) -> None:
    payload = {
        "strategy": report.strategy,
        "driver": report.driver,
        "scenario": report.scenario,
        "total": report.total,
        "raw": report.raw,
        "normalized": report.normalized,
        "norms": report.norms.as_dict(),
        "raw_deltadot": report.raw_deltadot,
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def cmd_simulate(args) -> int:
    tree = cfg_mod.load_tree(args.config)
    cfg = cfg_mod.run_config_from(
        tree,
        strategy=args.strategy,
        verbatim_sigmoid=args.verbatim_sigmoid,
        base_dir=Path(args.config).parent,
    )
    out_dir = resolve_out_dir(args.out)
    try:
        runlog = run_takeover(cfg)
    except DivergenceError as exc:
        partial = getattr(exc, "partial_log", None)
        if partial is not None and len(partial) > 0:
            path = write_runlog_csv(partial, out_dir / f"{partial.run_name()}_partial.csv")
            log.error("run diverged at step %s; partial log at %s", exc.step, path)
        raise
    csv_path = write_runlog_csv(runlog, out_dir / f"{runlog.run_name()}.csv")
    report = metrics.cumulative_error(runlog, metrics.batch_norms([runlog]))
    _write_report_json(report, out_dir / f"{runlog.run_name()}_report.json")
    print(f"wrote {csv_path}")
    print(f"cumulative error (self-normalized): {report.total:.4f}")
    return EXIT_OK


def cmd_batch(args) -> int:
    tree = cfg_mod.load_tree(args.config)
    configs = cfg_mod.batch_plan(
        tree,
        seed=args.seed,
        strategy=args.strategy,
        verbatim_sigmoid=args.verbatim_sigmoid,
        base_dir=Path(args.config).parent,
    )
    out_dir = resolve_out_dir(args.out)
    jobs = args.jobs if args.jobs is not None else os.cpu_count() or 1
    results = run_batch(configs, jobs=jobs)

    failures = [
        (cfg, res) for cfg, res in zip(configs, results) if isinstance(res, Exception)
    ]
    logs = [res for res in results if isinstance(res, RunLog)]
    for cfg, exc in failures:
        print(
            f"FAILED {cfg.scenario.kind}/{cfg.transition.kind}/{cfg.driver.label}: {exc}",
            file=sys.stderr,
        )
    if not logs:
        raise DivergenceError("every run in the batch failed")

    for runlog in logs:
        write_runlog_csv(runlog, out_dir / f"{runlog.run_name()}.csv")

    for scenario_kind, table in _per_scenario_tables(logs).items():
        (out_dir / f"summary_{scenario_kind}.csv").write_text(table.to_csv())
        print(f"\n== {scenario_kind}")
        print(table.format())
    print(f"\n{len(logs)} runs written to {out_dir}")
    return EXIT_OK if not failures else EXIT_DIVERGENCE


def _per_scenario_tables(logs: list[RunLog]) -> dict[str, metrics.ComparisonTable]:
    groups: dict[str, list[RunLog]] = {}
    for runlog in logs:
        groups.setdefault(runlog.scenario, []).append(runlog)
    tables = {}
    for scenario_kind, group in groups.items():
        norms = metrics.batch_norms(group)
        reports = [metrics.cumulative_error(rl, norms) for rl in group]
        try:
            tables[scenario_kind] = metrics.compare_strategies(reports)
        except ValueError as exc:
            log.warning("skipping comparison for %s: %s", scenario_kind, exc)
    return tables


def cmd_estimate(args) -> int:
    tree = cfg_mod.load_tree(args.config)
    vehicle = cfg_mod.vehicle_from(tree)
    model = build_system_matrices(vehicle)
    driving_log = read_driving_log_csv(args.log)
    r = cfg_mod.driver_from(tree).r
    profile = estimate_q(driving_log, model, r=r, label=args.label)
    out_dir = resolve_out_dir(args.out)
    path = profile.save(out_dir / f"{profile.label}_profile.json")
    residual = fit_residual(profile, driving_log, model)
    print(f"wrote {path}")
    print(f"estimated q_diag: {[round(v, 6) for v in profile.q_diag]}")
    print(f"fit residual (RMS torque): {residual:.6f} N*m")
    return EXIT_OK


def cmd_report(args) -> int:
    runs_dir = Path(args.runs)
    if not runs_dir.is_dir():
        raise ConfigError(f"{runs_dir} is not a directory")
    logs = []
    for path in sorted(runs_dir.glob("*.csv")):
        if path.name.startswith(("summary", "figure_")):
            continue
        try:
            logs.append(read_runlog_csv(path))
        except (ConfigError, ValueError) as exc:
            print(f"skipping {path.name}: {exc}", file=sys.stderr)
    if not logs:
        raise ConfigError(f"no readable run CSVs in {runs_dir}")

    out_dir = resolve_out_dir(args.out)
    tables = _per_scenario_tables(logs)
    for scenario_kind, table in tables.items():
        (out_dir / f"summary_{scenario_kind}.csv").write_text(table.to_csv())
        _write_figure_csvs(out_dir, scenario_kind, table, logs)
        print(f"== {scenario_kind}")
        print(table.format())
    if len(tables) == 1:
        only = next(iter(tables.values()))
        (out_dir / "summary.csv").write_text(only.to_csv())
    return EXIT_OK


def _write_figure_csvs(out_dir, scenario_kind, table, logs):
    (out_dir / f"figure_error_bars_{scenario_kind}.csv").write_text(table.to_csv())
    rows = ["strategy,driver,t,td,ta"]
    for runlog in logs:
        if runlog.scenario != scenario_kind:
            continue
        for i in range(len(runlog)):
            rows.append(
                f"{runlog.strategy},{runlog.driver},{float(runlog.t[i])!r},"
                f"{float(runlog.td[i])!r},{float(runlog.ta[i])!r}"
            )
    (out_dir / f"figure_steering_{scenario_kind}.csv").write_text("\n".join(rows) + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    handler = {
        "simulate": cmd_simulate,
        "batch": cmd_batch,
        "estimate": cmd_estimate,
        "report": cmd_report,
    }[args.command]
    try:
        return handler(args)
    except (ConfigError, EstimationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
