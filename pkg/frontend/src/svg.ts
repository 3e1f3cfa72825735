/**
 * Minimal SVG chart builder: line/marker series on linear or log axes,
 * with ticks, legend, and free-text annotations.  Pure string assembly so
 * identical inputs give identical bytes.
 */

export type Scale = "linear" | "log";
export type Marker = "none" | "circle" | "cross";

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: string;
  line?: boolean;
  dash?: string;
  marker?: Marker;
  extraClass?: string;
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  xScale: Scale;
  yScale: Scale;
  series: Series[];
  annotations?: string[];
  width?: number;
  height?: number;
}

const MARGIN = { top: 40, right: 20, bottom: 48, left: 64 };

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function finitePoints(series: Series[], scale: Scale, axis: "x" | "y"): number[] {
  const vals: number[] = [];
  for (const s of series) {
    for (const v of s[axis]) {
      if (Number.isFinite(v) && (scale === "linear" || v > 0)) vals.push(v);
    }
  }
  return vals;
}

/** Pick a log axis when positive values span more than three decades. */
export function chooseScale(values: number[]): Scale {
  const pos = values.filter((v) => Number.isFinite(v) && v > 0);
  if (pos.length < 2) return "linear";
  const span = Math.max(...pos) / Math.min(...pos);
  return span > 1e3 ? "log" : "linear";
}

interface Mapper {
  (v: number): number;
}

function makeMapper(scale: Scale, lo: number, hi: number, outLo: number, outHi: number): Mapper {
  if (scale === "log") {
    const llo = Math.log10(lo);
    const lhi = Math.log10(hi);
    return (v) => outLo + ((Math.log10(v) - llo) / (lhi - llo || 1)) * (outHi - outLo);
  }
  return (v) => outLo + ((v - lo) / (hi - lo || 1)) * (outHi - outLo);
}

function linearTicks(lo: number, hi: number, target = 6): number[] {
  const span = hi - lo || 1;
  const step0 = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= target) ?? mag * 10;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); e <= Math.floor(Math.log10(hi) + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks.length >= 2 ? ticks : [lo, hi];
}

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0).replace("e+", "e");
  return Number(v.toPrecision(4)).toString();
}

function markerSvg(kind: Marker, x: number, y: number, color: string, cls: string): string {
  if (kind === "circle") {
    return `<circle class="${cls}" cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="3.2" fill="${color}"/>`;
  }
  const d = 4;
  return (
    `<path class="${cls}" stroke="${color}" stroke-width="1.6" ` +
    `d="M${(x - d).toFixed(2)} ${(y - d).toFixed(2)} L${(x + d).toFixed(2)} ${(y + d).toFixed(2)} ` +
    `M${(x - d).toFixed(2)} ${(y + d).toFixed(2)} L${(x + d).toFixed(2)} ${(y - d).toFixed(2)}"/>`
  );
}

export function buildChart(spec: ChartSpec): string {
  const width = spec.width ?? 720;
  const height = spec.height ?? 440;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const xs = finitePoints(spec.series, spec.xScale, "x");
  const ys = finitePoints(spec.series, spec.yScale, "y");
  const empty = xs.length === 0 || ys.length === 0;

  const pad = (lo: number, hi: number, scale: Scale): [number, number] => {
    if (scale === "log") return [lo / 1.3, hi * 1.3];
    const m = 0.05 * (hi - lo || Math.abs(hi) || 1);
    return [lo - m, hi + m];
  };
  const [xLo, xHi] = empty ? [0, 1] : pad(Math.min(...xs), Math.max(...xs), spec.xScale);
  const [yLo, yHi] = empty ? [0, 1] : pad(Math.min(...ys), Math.max(...ys), spec.yScale);

  const mapX = makeMapper(spec.xScale, xLo, xHi, MARGIN.left, MARGIN.left + plotW);
  const mapY = makeMapper(spec.yScale, yLo, yHi, MARGIN.top + plotH, MARGIN.top);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<g class="chart" data-xscale="${spec.xScale}" data-yscale="${spec.yScale}">`,
  );
  parts.push(
    `<text x="${width / 2}" y="22" text-anchor="middle" font-size="15">${esc(spec.title)}</text>`,
  );

  // frame
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" ` +
    `fill="none" stroke="#444"/>`,
  );

  // ticks and grid
  const xTicks = empty ? [] : spec.xScale === "log" ? logTicks(xLo, xHi) : linearTicks(xLo, xHi);
  const yTicks = empty ? [] : spec.yScale === "log" ? logTicks(yLo, yHi) : linearTicks(yLo, yHi);
  for (const v of xTicks) {
    if (v < xLo || v > xHi) continue;
    const px = mapX(v);
    parts.push(
      `<line x1="${px.toFixed(2)}" y1="${MARGIN.top}" x2="${px.toFixed(2)}" ` +
      `y2="${MARGIN.top + plotH}" stroke="#ddd"/>`,
    );
    parts.push(
      `<text x="${px.toFixed(2)}" y="${MARGIN.top + plotH + 16}" ` +
      `text-anchor="middle">${esc(fmtTick(v))}</text>`,
    );
  }
  for (const v of yTicks) {
    if (v < yLo || v > yHi) continue;
    const py = mapY(v);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${py.toFixed(2)}" x2="${MARGIN.left + plotW}" ` +
      `y2="${py.toFixed(2)}" stroke="#ddd"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 6}" y="${(py + 4).toFixed(2)}" ` +
      `text-anchor="end">${esc(fmtTick(v))}</text>`,
    );
  }

  // axis labels
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${height - 10}" ` +
    `text-anchor="middle">${esc(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text x="16" y="${MARGIN.top + plotH / 2}" text-anchor="middle" ` +
    `transform="rotate(-90 16 ${MARGIN.top + plotH / 2})">${esc(spec.yLabel)}</text>`,
  );

  // series
  for (const s of spec.series) {
    const cls = `series ${s.extraClass ?? ""}`.trim();
    const pts: [number, number][] = [];
    for (let i = 0; i < s.x.length; i++) {
      const vx = s.x[i];
      const vy = s.y[i];
      const ok =
        Number.isFinite(vx) && Number.isFinite(vy) &&
        (spec.xScale === "linear" || vx > 0) && (spec.yScale === "linear" || vy > 0);
      if (ok) pts.push([mapX(vx), mapY(vy)]);
    }
    if ((s.line ?? true) && pts.length >= 2) {
      const d = pts.map(([px, py]) => `${px.toFixed(2)},${py.toFixed(2)}`).join(" ");
      const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
      parts.push(
        `<polyline class="${cls}" data-label="${esc(s.label)}" points="${d}" ` +
        `fill="none" stroke="${s.color}" stroke-width="1.6"${dash}/>`,
      );
    }
    if ((s.marker ?? "circle") !== "none") {
      for (const [px, py] of pts) {
        parts.push(markerSvg(s.marker ?? "circle", px, py, s.color, cls));
      }
    }
  }

  // legend
  let ly = MARGIN.top + 14;
  const maxLabel = Math.max(0, ...spec.series.map((s) => s.label.length));
  const lx = Math.max(MARGIN.left + 8, MARGIN.left + plotW - 36 - 6.6 * maxLabel);
  for (const s of spec.series) {
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" ` +
      `stroke="${s.color}" stroke-width="2"${dash}/>`,
    );
    parts.push(`<text class="legend" x="${lx + 28}" y="${ly}">${esc(s.label)}</text>`);
    ly += 16;
  }

  // annotations (warnings, fit summaries)
  const notes = spec.annotations ?? [];
  let ny = MARGIN.top + plotH / 2 - (8 * notes.length);
  for (const note of notes) {
    parts.push(
      `<text class="annotation" x="${MARGIN.left + plotW / 2}" y="${ny}" ` +
      `text-anchor="middle" fill="#b00">${esc(note)}</text>`,
    );
    ny += 18;
  }

  parts.push("</g></svg>");
  return parts.join("\n") + "\n";
}
