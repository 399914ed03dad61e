/**
 * Minimal deterministic SVG chart builder: axes, linear/log scales, polylines,
 * legends. No timestamps or random ids anywhere, so re-rendering the same data
 * yields byte-identical files.
 */

export interface AxisScale {
  kind: "linear" | "log";
  min: number;
  max: number;
  toPx(v: number): number;
}

export class ScaleError extends Error {}

export const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22",
];

export function makeScale(
  kind: "linear" | "log",
  min: number,
  max: number,
  pxLo: number,
  pxHi: number
): AxisScale {
  if (kind === "log") {
    if (min <= 0 || max <= 0) {
      throw new ScaleError(`log scale needs positive bounds, got [${min}, ${max}]`);
    }
    const lo = Math.log10(min);
    const hi = Math.log10(max);
    const span = hi - lo || 1;
    return {
      kind,
      min,
      max,
      toPx: (v) => pxLo + ((Math.log10(v) - lo) / span) * (pxHi - pxLo),
    };
  }
  const span = max - min || 1;
  return { kind, min, max, toPx: (v) => pxLo + ((v - min) / span) * (pxHi - pxLo) };
}

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0).replace("+", "");
  return Number(v.toPrecision(4)).toString();
}

export function linearTicks(min: number, max: number, n = 5): number[] {
  if (!(max > min)) return [min];
  const rawStep = (max - min) / n;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const norm = rawStep / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const ticks: number[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + 1e-12 * step; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

export function logTicks(min: number, max: number): number[] {
  const lo = Math.ceil(Math.log10(min) - 1e-9);
  const hi = Math.floor(Math.log10(max) + 1e-9);
  const ticks: number[] = [];
  for (let e = lo; e <= hi; e++) ticks.push(Math.pow(10, e));
  if (ticks.length === 0) ticks.push(min, max);
  return ticks;
}

export interface PanelSeries {
  label: string;
  color: string;
  points: Array<[number, number]>;
  dash?: string;
}

export interface PanelOpts {
  title: string;
  xLabel: string;
  yLabel: string;
  yScale: "linear" | "log";
  series: PanelSeries[];
  width?: number;
  height?: number;
  legend?: boolean;
}

const MARGIN = { top: 34, right: 16, bottom: 42, left: 70 };

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Render one x/y panel; returns the inner SVG fragment plus its height. */
export function renderPanel(opts: PanelOpts, yOffset = 0): { body: string; height: number } {
  const W = opts.width ?? 720;
  const H = opts.height ?? 360;
  const x0 = MARGIN.left;
  const x1 = W - MARGIN.right;
  const yTopPx = yOffset + MARGIN.top;
  const yBotPx = yOffset + H - MARGIN.bottom;

  const finite = (p: [number, number]) =>
    Number.isFinite(p[0]) && Number.isFinite(p[1]);
  let cleaned = opts.series.map((s) => ({
    ...s,
    points: s.points.filter(finite),
  }));
  if (opts.yScale === "log") {
    // zero samples (e.g. the t = 0 error) cannot appear on a log axis
    cleaned = cleaned.map((s) => ({ ...s, points: s.points.filter((p) => p[1] > 0) }));
  }
  cleaned = cleaned.filter((s) => s.points.length > 0);
  if (cleaned.length === 0) {
    throw new ScaleError(`panel "${opts.title}": no drawable points`);
  }

  // loop-based extrema: spreading 1e5-sample series into Math.min overflows the stack
  let xMin = Infinity, xMax = -Infinity, yMin = Infinity, yMax = -Infinity;
  for (const s of cleaned) {
    for (const [x, y] of s.points) {
      if (x < xMin) xMin = x;
      if (x > xMax) xMax = x;
      if (y < yMin) yMin = y;
      if (y > yMax) yMax = y;
    }
  }
  if (opts.yScale === "linear" && yMin === yMax) {
    yMin -= 1;
    yMax += 1;
  }
  if (opts.yScale === "linear") {
    const pad = 0.05 * (yMax - yMin);
    yMin -= pad;
    yMax += pad;
  }

  const sx = makeScale("linear", xMin, xMax, x0, x1);
  const sy = makeScale(opts.yScale, yMin, yMax, yBotPx, yTopPx);

  const parts: string[] = [];
  parts.push(`<rect x="${x0}" y="${yTopPx}" width="${x1 - x0}" height="${yBotPx - yTopPx}" fill="none" stroke="#444" stroke-width="1"/>`);
  parts.push(`<text x="${(x0 + x1) / 2}" y="${yOffset + 18}" text-anchor="middle" font-size="14" font-family="sans-serif">${esc(opts.title)}</text>`);

  const xTicks = linearTicks(xMin, xMax);
  for (const v of xTicks) {
    const px = sx.toPx(v);
    parts.push(`<line x1="${px.toFixed(2)}" y1="${yBotPx}" x2="${px.toFixed(2)}" y2="${yBotPx + 4}" stroke="#444"/>`);
    parts.push(`<text x="${px.toFixed(2)}" y="${yBotPx + 18}" text-anchor="middle" font-size="11" font-family="sans-serif">${fmtTick(v)}</text>`);
  }
  const yTicks = opts.yScale === "log" ? logTicks(yMin, yMax) : linearTicks(yMin, yMax);
  for (const v of yTicks) {
    const py = sy.toPx(v);
    parts.push(`<line x1="${x0 - 4}" y1="${py.toFixed(2)}" x2="${x0}" y2="${py.toFixed(2)}" stroke="#444"/>`);
    parts.push(`<line x1="${x0}" y1="${py.toFixed(2)}" x2="${x1}" y2="${py.toFixed(2)}" stroke="#ddd" stroke-width="0.5"/>`);
    parts.push(`<text x="${x0 - 8}" y="${(py + 4).toFixed(2)}" text-anchor="end" font-size="11" font-family="sans-serif">${fmtTick(v)}</text>`);
  }
  parts.push(`<text x="${(x0 + x1) / 2}" y="${yBotPx + 34}" text-anchor="middle" font-size="12" font-family="sans-serif">${esc(opts.xLabel)}</text>`);
  parts.push(`<text x="${x0 - 52}" y="${(yTopPx + yBotPx) / 2}" text-anchor="middle" font-size="12" font-family="sans-serif" transform="rotate(-90 ${x0 - 52} ${(yTopPx + yBotPx) / 2})">${esc(opts.yLabel)}</text>`);

  for (const s of cleaned) {
    const pts = s.points
      .map((p) => `${sx.toPx(p[0]).toFixed(2)},${sy.toPx(p[1]).toFixed(2)}`)
      .join(" ");
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(`<polyline points="${pts}" fill="none" stroke="${s.color}" stroke-width="1.5"${dash} data-label="${esc(s.label)}"/>`);
  }

  if (opts.legend !== false) {
    let ly = yTopPx + 8;
    for (const s of cleaned) {
      parts.push(`<line x1="${x1 - 120}" y1="${ly}" x2="${x1 - 96}" y2="${ly}" stroke="${s.color}" stroke-width="2"${s.dash ? ` stroke-dasharray="${s.dash}"` : ""}/>`);
      parts.push(`<text x="${x1 - 90}" y="${ly + 4}" font-size="11" font-family="sans-serif" class="legend">${esc(s.label)}</text>`);
      ly += 16;
    }
  }

  return { body: parts.join("\n"), height: H };
}

export function svgDocument(bodies: string[], width: number, totalHeight: number): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${totalHeight}" viewBox="0 0 ${width} ${totalHeight}">`,
    `<rect width="${width}" height="${totalHeight}" fill="white"/>`,
    ...bodies,
    "</svg>",
    "",
  ].join("\n");
}
