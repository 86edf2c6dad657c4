import { readFileSync } from "fs";

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

/** Parse a simple comma-separated file (no quoting; our emitters never quote). */
export function readCsv(path: string): Table {
  const text = readFileSync(path, "utf8").trim();
  if (text.length === 0) {
    throw new Error(`${path}: empty CSV`);
  }
  const lines = text.split(/\r?\n/);
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new Error(`${path}: row ${i + 2} has ${cells.length} cells, expected ${columns.length}`);
    }
    const row: Record<string, string> = {};
    columns.forEach((name, j) => (row[name] = cells[j]));
    return row;
  });
  return { columns, rows };
}

export function requireColumns(table: Table, needed: string[], path: string): void {
  const missing = needed.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new Error(`${path}: missing required column(s) ${missing.join(", ")}`);
  }
}

export function numericColumn(table: Table, name: string, path: string): number[] {
  return table.rows.map((row, i) => {
    const v = Number(row[name]);
    if (!Number.isFinite(v)) {
      throw new Error(`${path}: non-numeric value ${row[name]!} in column ${name}, row ${i + 2}`);
    }
    return v;
  });
}

const KNOWN_SCENARIOS = ["double_lane_change", "lane_change", "custom"];

export interface RunName {
  scenario: string;
  strategy: string;
  driver: string;
}

/** Run CSVs are named `<scenario>_<strategy>_<driver>.csv` by the simulator. */
export function parseRunName(path: string): RunName {
  const stem = path.replace(/\\/g, "/").split("/").pop()!.replace(/\.csv$/i, "");
  for (const scenario of KNOWN_SCENARIOS) {
    if (stem.startsWith(scenario + "_")) {
      const rest = stem.slice(scenario.length + 1);
      const cut = rest.indexOf("_");
      if (cut > 0) {
        return { scenario, strategy: rest.slice(0, cut), driver: rest.slice(cut + 1) };
      }
      return { scenario, strategy: rest || "unknown", driver: "driver" };
    }
  }
  const parts = stem.split("_");
  return {
    scenario: parts[0] ?? "unknown",
    strategy: parts[1] ?? "unknown",
    driver: parts.slice(2).join("_") || "driver",
  };
}
