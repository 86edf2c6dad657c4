#!/usr/bin/env python3
"""Reproduce the transition-strategy comparison end to end.

Runs all six transition strategies over both ISO maneuvers for a synthetic
driver population, prints the per-scenario comparison tables, and leaves
run CSVs plus summaries in the output directory (plot-ready for the
frontend renderer).
"""

import argparse
import sys
import time
import warnings
from pathlib import Path

from takeover import config as cfg_mod
from takeover.cli import _per_scenario_tables
from takeover.sim import RunLog, run_batch, write_runlog_csv

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "lane_change.yaml"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=str(CONFIG))
    parser.add_argument("--out", default="out/comparison")
    parser.add_argument("--drivers", type=int, default=10)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--jobs", type=int, default=None)
    args = parser.parse_args()

    tree = cfg_mod.load_tree(args.config)
    tree.setdefault("batch", {})["drivers"] = {"count": args.drivers, "seed": args.seed}
    configs = cfg_mod.batch_plan(tree, base_dir=Path(args.config).parent)
    print(f"{len(configs)} runs planned "
          f"({args.drivers} drivers x strategies x scenarios), seed {args.seed}")

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    start = time.time()
    with warnings.catch_warnings():
        warnings.simplefilter("once", RuntimeWarning)
        results = run_batch(configs, jobs=args.jobs)
    logs = [r for r in results if isinstance(r, RunLog)]
    failed = len(results) - len(logs)
    print(f"{len(logs)} runs finished in {time.time() - start:.1f}s"
          + (f", {failed} failed" if failed else ""))

    for runlog in logs:
        write_runlog_csv(runlog, out_dir / f"{runlog.run_name()}.csv")
    for scenario, table in _per_scenario_tables(logs).items():
        (out_dir / f"summary_{scenario}.csv").write_text(table.to_csv())
        print(f"\n== {scenario}")
        print(table.format())
    print(f"\nCSVs in {out_dir}")
    return 0 if not failed else 2


if __name__ == "__main__":
    sys.exit(main())
