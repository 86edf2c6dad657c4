import { numericColumn, readCsv, requireColumns } from "./csv.js";
import { SvgDoc, drawXAxisLine, drawYAxis, fmt, linearScale } from "./svg.js";

export interface ErrorBarsData {
  strategies: string[];
  means: number[];
  stds: number[];
  baseline: string | null;
}

export function loadErrorBars(summaryPath: string): ErrorBarsData {
  const table = readCsv(summaryPath);
  requireColumns(table, ["strategy", "mean_total", "std_total"], summaryPath);
  const strategies = table.rows.map((r) => r.strategy);
  return {
    strategies,
    means: numericColumn(table, "mean_total", summaryPath),
    stds: numericColumn(table, "std_total", summaryPath),
    baseline: strategies.includes("step") ? "step" : null,
  };
}

const BAR_FILL = "#4878a8";
const BASELINE_FILL = "#b05454";

export function renderErrorBars(data: ErrorBarsData, title: string): string {
  const width = Math.max(420, 90 * data.strategies.length + 120);
  const height = 360;
  const frame = { x0: 70, y0: 46, plotW: width - 100, plotH: height - 120 };
  const doc = new SvgDoc(width, height);

  const top = Math.max(...data.means.map((m, i) => m + data.stds[i]), 0);
  const yScale = linearScale([0, top * 1.1 || 1], [frame.y0 + frame.plotH, frame.y0]);

  doc.text(width / 2, 24, title, 'text-anchor="middle" font-size="14" fill="#111"');
  drawYAxis(doc, frame, yScale, "cumulative error");
  drawXAxisLine(doc, frame);

  const slot = frame.plotW / data.strategies.length;
  const barW = slot * 0.55;
  data.strategies.forEach((strategy, i) => {
    const cx = frame.x0 + slot * (i + 0.5);
    const mean = data.means[i];
    const std = data.stds[i];
    const yTop = yScale(mean);
    const fill = strategy === data.baseline ? BASELINE_FILL : BAR_FILL;
    doc.rect(cx - barW / 2, yTop, barW, yScale(0) - yTop, `fill="${fill}"`);
    if (std > 0) {
      const hi = yScale(mean + std);
      const lo = yScale(Math.max(mean - std, 0));
      const whisker = 'stroke="#222" stroke-width="1.5"';
      doc.line(cx, hi, cx, lo, whisker);
      doc.line(cx - barW * 0.25, hi, cx + barW * 0.25, hi, whisker);
      doc.line(cx - barW * 0.25, lo, cx + barW * 0.25, lo, whisker);
    }
    doc.text(cx, frame.y0 + frame.plotH + 16, strategy, 'text-anchor="middle" font-size="11" fill="#333"');
    doc.text(cx, yTop - 6, fmt(Number(mean.toFixed(3))), 'text-anchor="middle" font-size="9" fill="#555"');
  });

  if (data.baseline) {
    const baseMean = data.means[data.strategies.indexOf(data.baseline)];
    const y = yScale(baseMean);
    doc.line(frame.x0, y, frame.x0 + frame.plotW, y, 'stroke="#b05454" stroke-width="1" stroke-dasharray="5,4"');
    doc.text(
      frame.x0 + frame.plotW,
      y - 5,
      `${data.baseline} baseline`,
      'text-anchor="end" font-size="10" fill="#b05454"',
    );
  }
  return doc.render();
}
