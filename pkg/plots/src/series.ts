/**
 * Extraction of the plotted data series from parsed harness outputs.
 *
 * This module is a pure view: a gap curve is the recorded objective column
 * minus the recorded reference optimum, and a band is the recorded mean and
 * 95% CI columns shifted by the same reference.  Nothing is ever recomputed
 * from iterates, and a missing reference optimum is a refusal, not a guess.
 */

import { SchemaError, SweepStatsFile, TraceFile } from "./schema.js";

export type GapField = "f_last" | "f_avg";

export interface CurveSeries {
  label: string;
  source: string;
  t: number[];
  gap: number[];
}

export interface BandSeries {
  label: string;
  source: string;
  t: number[];
  mean: number[];
  lo: number[];
  hi: number[];
}

export interface PlotData {
  field: GapField;
  fStar: number;
  curves: CurveSeries[];
  bands: BandSeries[];
}

function resolveReference(fStar: number | null, source: string): number {
  if (fStar === null || !Number.isFinite(fStar)) {
    throw new SchemaError(
      source,
      "no reference optimum recorded; gap plots refuse to invent one",
    );
  }
  return fStar;
}

/** One gap curve per trace, in sorted (solver, seed) order. */
export function curvesFromTraces(
  traces: TraceFile[],
  field: GapField,
  fStar: number | null,
  referenceSource: string,
): CurveSeries[] {
  const ref = resolveReference(fStar, referenceSource);
  const curves = traces.map((trace) => ({
    label: trace.seed === null ? trace.solver : `${trace.solver} (seed ${trace.seed})`,
    source: trace.file,
    t: trace.rows.map((r) => r.t),
    gap: trace.rows.map((r) => (field === "f_last" ? r.fLast : r.fAvg) - ref),
  }));
  curves.sort((a, b) => (a.label < b.label ? -1 : a.label > b.label ? 1 : 0));
  return curves;
}

/** Mean curve plus shaded 95% interval per solver from aggregated sweep stats. */
export function bandsFromSweepStats(
  stats: SweepStatsFile,
  field: GapField,
): { mean: CurveSeries[]; bands: BandSeries[] } {
  const ref = resolveReference(stats.fStar, stats.file);
  const mean: CurveSeries[] = [];
  const bands: BandSeries[] = [];
  const labels = [...stats.solvers.keys()].sort();
  for (const label of labels) {
    const agg = stats.solvers.get(label)!;
    const column = field === "f_last" ? agg.fLast : agg.fAvg;
    const gap = column.mean.map((v) => v - ref);
    mean.push({ label, source: stats.file, t: agg.t, gap });
    bands.push({
      label,
      source: stats.file,
      t: agg.t,
      mean: gap,
      lo: gap.map((v, i) => v - column.ci95[i]!),
      hi: gap.map((v, i) => v + column.ci95[i]!),
    });
  }
  return { mean, bands };
}

/** Stable JSON form of the plotted series, used by the golden-file tests. */
export function plotDataToJson(data: PlotData): string {
  return JSON.stringify(
    {
      field: data.field,
      f_star: data.fStar,
      curves: data.curves.map((c) => ({
        label: c.label,
        t: c.t,
        gap: c.gap,
      })),
      bands: data.bands.map((b) => ({
        label: b.label,
        t: b.t,
        mean: b.mean,
        lo: b.lo,
        hi: b.hi,
      })),
    },
    null,
    1,
  );
}
