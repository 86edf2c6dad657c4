import { numericColumn, parseRunName, readCsv, requireColumns } from "./csv.js";
import { SvgDoc, drawXAxisLine, drawYAxis, fmt, linearScale, niceTicks } from "./svg.js";

export interface Trace {
  strategy: string;
  driver: string;
  t: number[];
  td: number[];
  ta: number[];
  window: [number, number] | null;
}

export interface SteeringData {
  scenario: string;
  traces: Trace[];
  /** strategy -> traces, in first-seen order */
  panels: Map<string, Trace[]>;
}

/** The transition window is observable from the driver-share column. */
function inferWindow(t: number[], alphaD: number[]): [number, number] | null {
  let start: number | null = null;
  let end: number | null = null;
  for (let i = 0; i < t.length; i++) {
    if (start === null && alphaD[i] > 0) {
      start = t[i];
    }
    if (start !== null && end === null && alphaD[i] >= 1) {
      end = t[i];
      break;
    }
  }
  if (start === null) {
    return null;
  }
  return [start, end ?? t[t.length - 1]];
}

export function loadSteeringTraces(paths: string[], window?: [number, number]): SteeringData {
  if (paths.length === 0) {
    throw new Error("no run CSVs given");
  }
  const traces: Trace[] = [];
  let scenario: string | null = null;
  for (const path of paths) {
    const name = parseRunName(path);
    if (scenario === null) {
      scenario = name.scenario;
    } else if (name.scenario !== scenario) {
      throw new Error(
        `mixed scenarios: ${path} is ${name.scenario}, expected ${scenario}; plot one scenario at a time`,
      );
    }
    const table = readCsv(path);
    requireColumns(table, ["t", "td", "ta", "alpha_d"], path);
    const t = numericColumn(table, "t", path);
    traces.push({
      strategy: name.strategy,
      driver: name.driver,
      t,
      td: numericColumn(table, "td", path),
      ta: numericColumn(table, "ta", path),
      window: window ?? inferWindow(t, numericColumn(table, "alpha_d", path)),
    });
  }
  const panels = new Map<string, Trace[]>();
  for (const trace of traces) {
    const group = panels.get(trace.strategy) ?? [];
    group.push(trace);
    panels.set(trace.strategy, group);
  }
  return { scenario: scenario!, traces, panels };
}

const DRIVER_COLOR = "#c03028";
const ADAS_COLOR = "#3060a8";
const WINDOW_FILL = 'fill="#f3e6b0" fill-opacity="0.55"';

export function renderSteeringTraces(data: SteeringData, title: string): string {
  const panelH = 130;
  const width = 640;
  const headerH = 56;
  const panels = [...data.panels.entries()];
  const height = headerH + panels.length * panelH + 30;
  const doc = new SvgDoc(width, height);
  doc.text(width / 2, 24, title, 'text-anchor="middle" font-size="14" fill="#111"');

  // shared legend
  doc.line(width - 230, 38, width - 205, 38, `stroke="${DRIVER_COLOR}" stroke-width="2"`);
  doc.text(width - 200, 42, "driver torque", 'font-size="10" fill="#333"');
  doc.line(width - 120, 38, width - 95, 38, `stroke="${ADAS_COLOR}" stroke-width="2" stroke-dasharray="6,3"`);
  doc.text(width - 90, 42, "ADAS torque", 'font-size="10" fill="#333"');

  const tMin = Math.min(...data.traces.map((tr) => tr.t[0]));
  const tMax = Math.max(...data.traces.map((tr) => tr.t[tr.t.length - 1]));

  panels.forEach(([strategy, traces], p) => {
    const frame = { x0: 70, y0: headerH + p * panelH, plotW: width - 100, plotH: panelH - 34 };
    const xScale = linearScale([tMin, tMax], [frame.x0, frame.x0 + frame.plotW]);
    const torques = traces.flatMap((tr) => [...tr.td, ...tr.ta]);
    const hi = Math.max(...torques.map(Math.abs), 0.1) * 1.1;
    const yScale = linearScale([-hi, hi], [frame.y0 + frame.plotH, frame.y0]);

    const window = traces[0].window;
    if (window && window[1] > window[0]) {
      doc.rect(xScale(window[0]), frame.y0, xScale(window[1]) - xScale(window[0]), frame.plotH, WINDOW_FILL);
    }
    doc.line(frame.x0, yScale(0), frame.x0 + frame.plotW, yScale(0), 'stroke="#ccc" stroke-width="0.7"');
    drawYAxis(doc, frame, yScale, "torque (N m)");
    drawXAxisLine(doc, frame);
    for (const tick of niceTicks(tMin, tMax, 6)) {
      const x = xScale(tick);
      doc.line(x, frame.y0 + frame.plotH, x, frame.y0 + frame.plotH + 4, 'stroke="#333" stroke-width="1"');
      doc.text(x, frame.y0 + frame.plotH + 15, fmt(tick), 'text-anchor="middle" font-size="9" fill="#333"');
    }

    const thin = traces.length > 1;
    for (const tr of traces) {
      const w = thin ? 1 : 1.8;
      doc.polyline(tr.t.map(xScale), tr.td.map(yScale), `stroke="${DRIVER_COLOR}" stroke-width="${w}"`);
      doc.polyline(tr.t.map(xScale), tr.ta.map(yScale), `stroke="${ADAS_COLOR}" stroke-width="${w}" stroke-dasharray="6,3"`);
    }
    doc.text(frame.x0 + 6, frame.y0 + 13, strategy, 'font-size="12" font-weight="bold" fill="#222"');
  });
  doc.text(width / 2, height - 8, "time (s)", 'text-anchor="middle" font-size="11" fill="#333"');
  return doc.render();
}
