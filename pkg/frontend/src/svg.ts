/** Minimal SVG assembly: linear scales, axes, and shape helpers. */

export interface Scale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 === 0 ? 1 : d1 - d0;
  const fn = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  fn.domain = domain;
  fn.range = range;
  return fn;
}

export function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (lo === hi) {
    return [lo];
  }
  const raw = (hi - lo) / count;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12; v += step) {
    ticks.push(Number(v.toFixed(12)));
  }
  return ticks;
}

export function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function fmt(v: number): string {
  return Number(v.toFixed(6)).toString();
}

export class SvgDoc {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {}

  add(fragment: string): void {
    this.parts.push(fragment);
  }

  line(x1: number, y1: number, x2: number, y2: number, style: string): void {
    this.add(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ${style}/>`,
    );
  }

  rect(x: number, y: number, w: number, h: number, style: string): void {
    this.add(`<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" ${style}/>`);
  }

  text(x: number, y: number, content: string, style = ""): void {
    this.add(`<text x="${fmt(x)}" y="${fmt(y)}" ${style}>${esc(content)}</text>`);
  }

  polyline(xs: number[], ys: number[], style: string): void {
    const pts = xs.map((x, i) => `${fmt(x)},${fmt(ys[i])}`).join(" ");
    this.add(`<polyline points="${pts}" fill="none" ${style}/>`);
  }

  render(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" ` +
        `viewBox="0 0 ${this.width} ${this.height}" font-family="Helvetica, Arial, sans-serif">`,
      `<rect width="${this.width}" height="${this.height}" fill="white"/>`,
      ...this.parts,
      "</svg>",
    ].join("\n");
  }
}

export interface Frame {
  x0: number;
  y0: number;
  plotW: number;
  plotH: number;
}

/** Draw a y axis with ticks/labels and return nothing; caller owns scales. */
export function drawYAxis(doc: SvgDoc, frame: Frame, scale: Scale, label: string): void {
  const axis = 'stroke="#333" stroke-width="1"';
  doc.line(frame.x0, frame.y0, frame.x0, frame.y0 + frame.plotH, axis);
  for (const tick of niceTicks(scale.domain[0], scale.domain[1])) {
    const y = scale(tick);
    doc.line(frame.x0 - 4, y, frame.x0, y, axis);
    doc.text(frame.x0 - 7, y + 3.5, fmt(tick), 'text-anchor="end" font-size="10" fill="#333"');
  }
  doc.text(
    14,
    frame.y0 + frame.plotH / 2,
    label,
    `text-anchor="middle" font-size="11" fill="#333" transform="rotate(-90 14 ${fmt(
      frame.y0 + frame.plotH / 2,
    )})"`,
  );
}

export function drawXAxisLine(doc: SvgDoc, frame: Frame): void {
  doc.line(
    frame.x0,
    frame.y0 + frame.plotH,
    frame.x0 + frame.plotW,
    frame.y0 + frame.plotH,
    'stroke="#333" stroke-width="1"',
  );
}
