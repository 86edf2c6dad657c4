#!/usr/bin/env node
/**
 * Render takeover simulation CSVs into static SVG figures.
 *
 *   plot error_bars      --in summary.csv --out figure.svg [--title ...]
 *   plot steering_traces --in run1.csv run2.csv ... --out figure.svg
 *                        [--window tS tE] [--title ...]
 *
 * --dump-data <path.json> additionally writes the exact plotted arrays so
 * they can be diffed against the source CSVs.
 */

import { writeFileSync } from "fs";
import { loadErrorBars, renderErrorBars } from "./errorBars.js";
import { loadSteeringTraces, renderSteeringTraces } from "./steeringTraces.js";

interface Args {
  kind: string;
  inputs: string[];
  out: string;
  title: string | null;
  window: [number, number] | null;
  dumpData: string | null;
}

export function parseArgs(argv: string[]): Args {
  if (argv.length === 0 || argv[0].startsWith("-")) {
    throw new Error("usage: plot <error_bars|steering_traces> --in <csv...> --out <file.svg>");
  }
  const args: Args = {
    kind: argv[0],
    inputs: [],
    out: "",
    title: null,
    window: null,
    dumpData: null,
  };
  let i = 1;
  const next = (flag: string): string => {
    i += 1;
    if (i >= argv.length || argv[i].startsWith("--")) {
      throw new Error(`${flag} expects a value`);
    }
    return argv[i];
  };
  while (i < argv.length) {
    const flag = argv[i];
    switch (flag) {
      case "--in":
        while (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
          i += 1;
          args.inputs.push(argv[i]);
        }
        break;
      case "--out":
        args.out = next(flag);
        break;
      case "--title":
        args.title = next(flag);
        break;
      case "--dump-data":
        args.dumpData = next(flag);
        break;
      case "--window": {
        const a = Number(next(flag));
        const b = Number(next(flag));
        if (!Number.isFinite(a) || !Number.isFinite(b) || b < a) {
          throw new Error("--window expects two ordered numbers");
        }
        args.window = [a, b];
        break;
      }
      default:
        throw new Error(`unknown flag ${flag}`);
    }
    i += 1;
  }
  if (args.inputs.length === 0) {
    throw new Error("--in requires at least one CSV path");
  }
  if (!args.out) {
    throw new Error("--out is required");
  }
  return args;
}

export function run(args: Args): void {
  let svg: string;
  let dump: unknown;
  if (args.kind === "error_bars") {
    if (args.inputs.length !== 1) {
      throw new Error("error_bars takes exactly one summary CSV");
    }
    const data = loadErrorBars(args.inputs[0]);
    svg = renderErrorBars(data, args.title ?? "Cumulative error by transition strategy");
    dump = data;
  } else if (args.kind === "steering_traces") {
    const data = loadSteeringTraces(args.inputs, args.window ?? undefined);
    svg = renderSteeringTraces(
      data,
      args.title ?? `Steering torque contributions (${data.scenario})`,
    );
    dump = {
      scenario: data.scenario,
      traces: data.traces.map((t) => ({
        strategy: t.strategy,
        driver: t.driver,
        t: t.t,
        td: t.td,
        ta: t.ta,
        window: t.window,
      })),
    };
  } else {
    throw new Error(`unknown figure kind ${args.kind}; expected error_bars or steering_traces`);
  }
  writeFileSync(args.out, svg + "\n");
  if (args.dumpData) {
    writeFileSync(args.dumpData, JSON.stringify(dump, null, 2) + "\n");
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");

if (invokedDirectly) {
  try {
    run(parseArgs(process.argv.slice(2)));
  } catch (err) {
    console.error(`plot: ${err instanceof Error ? err.message : err}`);
    process.exit(1);
  }
}
