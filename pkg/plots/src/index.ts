export { loadSummary, loadSweepStats, loadTraceCsv, parseTraceCsv,
  SchemaError, TRACE_HEADER } from "./schema.js";
export type { SummaryFile, SweepSolverStats, SweepStatsFile, TraceFile,
  TraceRow } from "./schema.js";
export { bandsFromSweepStats, curvesFromTraces, plotDataToJson } from "./series.js";
export type { BandSeries, CurveSeries, GapField, PlotData } from "./series.js";
export { renderFigure } from "./svg.js";
export type { Axes, FigureSpec } from "./svg.js";
export { buildPlotData, expandInputs, run } from "./cli.js";
export type { CliOptions } from "./cli.js";
