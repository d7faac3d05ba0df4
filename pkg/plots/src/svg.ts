/**
 * Deterministic SVG rendering of convergence figures.
 *
 * No DOM, no renderer metadata, no timestamps: identical inputs produce the
 * identical file.  Curves become polylines, confidence bands become closed
 * polygons under the curves, and optional slope guides (t^-1/2, t^-1) are
 * drawn as dashed reference lines anchored to the first curve.
 */

import { BandSeries, CurveSeries } from "./series.js";

export type Axes = "loglog" | "loglinear";

export interface FigureSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  axes: Axes;
  guides: number[]; // slopes of t^s reference lines (log-log only)
  width?: number;
  height?: number;
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b", "#17becf", "#7f7f7f"];
const MARGIN = { left: 72, right: 24, top: 40, bottom: 48 };

function fmt(x: number): string {
  return (Math.round(x * 100) / 100).toFixed(2);
}

function tickLabel(v: number): string {
  if (v === 0) return "0";
  const exp = Math.floor(Math.log10(Math.abs(v)));
  if (exp >= -2 && exp <= 3) {
    return String(Math.round(v * 1e6) / 1e6);
  }
  return v.toExponential(0).replace("+", "");
}

interface Scale {
  (value: number): number;
  ticks: number[];
}

function makeScale(lo: number, hi: number, outLo: number, outHi: number,
                   log: boolean): Scale {
  const a = log ? Math.log10(lo) : lo;
  const b = log ? Math.log10(hi) : hi;
  const span = b - a || 1;
  const scale = ((value: number) => {
    const v = log ? Math.log10(value) : value;
    return outLo + ((v - a) / span) * (outHi - outLo);
  }) as Scale;
  if (log) {
    const ticks: number[] = [];
    for (let e = Math.ceil(a - 1e-9); e <= Math.floor(b + 1e-9); e += 1) {
      ticks.push(10 ** e);
    }
    scale.ticks = ticks.length >= 2 ? ticks : [lo, hi];
  } else {
    const ticks: number[] = [];
    for (let i = 0; i <= 5; i += 1) ticks.push(a + (span * i) / 5);
    scale.ticks = ticks;
  }
  return scale;
}

function finitePositive(values: number[], log: boolean): number[] {
  return values.filter((v) => Number.isFinite(v) && (!log || v > 0));
}

export function renderFigure(spec: FigureSpec, curves: CurveSeries[],
                             bands: BandSeries[] = []): string {
  if (curves.length === 0) {
    throw new Error("nothing to plot: no curves supplied");
  }
  const width = spec.width ?? 760;
  const height = spec.height ?? 520;
  const logY = true; // gap axes are always logarithmic
  const logX = spec.axes === "loglog";

  const xs: number[] = [];
  const ys: number[] = [];
  for (const c of curves) {
    xs.push(...finitePositive(c.t, logX));
    ys.push(...finitePositive(c.gap, logY));
  }
  for (const b of bands) {
    xs.push(...finitePositive(b.t, logX));
    ys.push(...finitePositive(b.lo, logY), ...finitePositive(b.hi, logY));
  }
  if (xs.length === 0 || ys.length === 0) {
    throw new Error("nothing to plot: no positive finite values for log axes");
  }
  const x = makeScale(Math.min(...xs), Math.max(...xs),
    MARGIN.left, width - MARGIN.right, logX);
  const y = makeScale(Math.min(...ys), Math.max(...ys),
    height - MARGIN.bottom, MARGIN.top, logY);

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif" font-size="12">`);
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(`<text x="${width / 2}" y="20" text-anchor="middle" font-size="15">${escapeXml(spec.title)}</text>`);

  // axes and grid
  const x0 = MARGIN.left;
  const x1 = width - MARGIN.right;
  const y0 = height - MARGIN.bottom;
  const y1 = MARGIN.top;
  for (const tick of x.ticks) {
    const px = fmt(x(tick));
    parts.push(`<line x1="${px}" y1="${y0}" x2="${px}" y2="${y1}" stroke="#dddddd"/>`);
    parts.push(`<text x="${px}" y="${y0 + 18}" text-anchor="middle">${tickLabel(tick)}</text>`);
  }
  for (const tick of y.ticks) {
    const py = fmt(y(tick));
    parts.push(`<line x1="${x0}" y1="${py}" x2="${x1}" y2="${py}" stroke="#dddddd"/>`);
    parts.push(`<text x="${x0 - 6}" y="${py}" text-anchor="end" dominant-baseline="middle">${tickLabel(tick)}</text>`);
  }
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`);
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`);
  parts.push(`<text x="${(x0 + x1) / 2}" y="${height - 10}" text-anchor="middle">${escapeXml(spec.xLabel)}</text>`);
  parts.push(`<text x="16" y="${(y0 + y1) / 2}" text-anchor="middle" transform="rotate(-90 16 ${(y0 + y1) / 2})">${escapeXml(spec.yLabel)}</text>`);

  // shaded confidence bands first, so curves draw on top
  bands.forEach((band, i) => {
    const color = PALETTE[i % PALETTE.length]!;
    const pts: string[] = [];
    const back: string[] = [];
    for (let k = 0; k < band.t.length; k += 1) {
      const tk = band.t[k]!;
      const hi = band.hi[k]!;
      const lo = band.lo[k]!;
      if ((logX && tk <= 0) || hi <= 0 || lo <= 0) continue;
      pts.push(`${fmt(x(tk))},${fmt(y(hi))}`);
      back.push(`${fmt(x(tk))},${fmt(y(lo))}`);
    }
    if (pts.length < 2) return;
    parts.push(`<path class="band" fill="${color}" fill-opacity="0.18" stroke="none" d="M${pts.join(" L")} L${back.reverse().join(" L")} Z"/>`);
  });

  // slope guides anchored to the first curve's first plotted point
  if (logX && spec.guides.length > 0) {
    const anchor = curves[0]!;
    const k0 = anchor.gap.findIndex((v, i) => v > 0 && anchor.t[i]! > 0);
    if (k0 >= 0) {
      const tA = anchor.t[k0]!;
      const gA = anchor.gap[k0]!;
      const tEnd = Math.max(...xs);
      for (const slope of spec.guides) {
        const gEnd = gA * (tEnd / tA) ** slope;
        parts.push(`<line class="guide" x1="${fmt(x(tA))}" y1="${fmt(y(gA))}" x2="${fmt(x(tEnd))}" y2="${fmt(y(Math.max(gEnd, Math.min(...ys))))}" stroke="#888888" stroke-dasharray="6 4"/>`);
        parts.push(`<text x="${fmt(x(tEnd) - 4)}" y="${fmt(y(Math.max(gEnd, Math.min(...ys))) - 6)}" text-anchor="end" fill="#888888">t^${slope}</text>`);
      }
    }
  }

  // curves
  curves.forEach((curve, i) => {
    const color = PALETTE[i % PALETTE.length]!;
    const pts: string[] = [];
    for (let k = 0; k < curve.t.length; k += 1) {
      const tk = curve.t[k]!;
      const gk = curve.gap[k]!;
      if ((logX && tk <= 0) || gk <= 0 || !Number.isFinite(gk)) continue;
      pts.push(`${fmt(x(tk))},${fmt(y(gk))}`);
    }
    if (pts.length === 0) return;
    parts.push(`<polyline class="curve" fill="none" stroke="${color}" stroke-width="1.6" points="${pts.join(" ")}"/>`);
  });

  // legend
  curves.forEach((curve, i) => {
    const color = PALETTE[i % PALETTE.length]!;
    const ly = MARGIN.top + 8 + 18 * i;
    parts.push(`<rect x="${x1 - 180}" y="${ly - 9}" width="12" height="12" fill="${color}"/>`);
    parts.push(`<text x="${x1 - 162}" y="${ly + 1}">${escapeXml(curve.label)}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
