#!/usr/bin/env node
/**
 * Command-line entry point.
 *
 * Per-run curves:   --input 'out/*.csv' [--summary out/summary.json]
 * Sweep with bands: --stats out/sweep_stats.json
 *
 * Gap curves need the reference optimum recorded in the summary / stats
 * JSON; the tool refuses to invent one.  Exit code 1 on schema mismatches
 * (the offending file is named) and on empty input; no output file is
 * written in that case.
 */

import { readdirSync, statSync, writeFileSync } from "node:fs";
import { basename, dirname, join } from "node:path";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { loadSummary, loadSweepStats, loadTraceCsv, SchemaError, TraceFile } from "./schema.js";
import { bandsFromSweepStats, curvesFromTraces, GapField, PlotData, plotDataToJson } from "./series.js";
import { renderFigure } from "./svg.js";

export function expandInputs(patterns: string[]): string[] {
  const files: string[] = [];
  for (const pattern of patterns) {
    if (pattern.includes("*")) {
      const dir = dirname(pattern);
      const rx = new RegExp(
        "^" + basename(pattern).split("*").map(escapeRegex).join(".*") + "$",
      );
      let names: string[] = [];
      try {
        names = readdirSync(dir);
      } catch {
        continue;
      }
      for (const name of names.sort()) {
        if (rx.test(name)) files.push(join(dir, name));
      }
    } else if (isFile(pattern)) {
      files.push(pattern);
    }
  }
  return files;
}

function isFile(path: string): boolean {
  try {
    return statSync(path).isFile();
  } catch {
    return false;
  }
}

function escapeRegex(s: string): string {
  return s.replace(/[.*+?^${}()|[\]\\]/g, "\\$&");
}

export interface CliOptions {
  input: string[];
  stats?: string;
  summary?: string;
  field: GapField;
  axes: "loglog" | "loglinear";
  out?: string;
  dumpSeries?: string;
  guides: number[];
  title?: string;
}

export function buildPlotData(opts: CliOptions): PlotData {
  if (opts.stats) {
    const stats = loadSweepStats(opts.stats);
    const { mean, bands } = bandsFromSweepStats(stats, opts.field);
    return { field: opts.field, fStar: stats.fStar!, curves: mean, bands };
  }
  const files = expandInputs(opts.input);
  if (files.length === 0) {
    throw new Error("no input files matched; nothing written");
  }
  const traces: TraceFile[] = files.map(loadTraceCsv);
  let fStar: number | null = null;
  let source = "";
  if (opts.summary) {
    const summary = loadSummary(opts.summary);
    fStar = summary.fStar;
    source = summary.file;
  } else {
    // fall back to the summary.json sitting next to the traces
    const candidate = join(dirname(files[0]!), "summary.json");
    if (isFile(candidate)) {
      const summary = loadSummary(candidate);
      fStar = summary.fStar;
      source = summary.file;
    } else {
      source = `${dirname(files[0]!)}/summary.json (missing)`;
    }
  }
  const curves = curvesFromTraces(traces, opts.field, fStar, source);
  return { field: opts.field, fStar: fStar!, curves, bands: [] };
}

export function run(opts: CliOptions): string {
  const data = buildPlotData(opts);
  if (opts.dumpSeries) {
    writeFileSync(opts.dumpSeries, plotDataToJson(data) + "\n");
  }
  const fieldName = opts.field === "f_last" ? "last iterate" : "ergodic average";
  const svg = renderFigure(
    {
      title: opts.title ?? `Optimality gap (${fieldName})`,
      xLabel: "iteration t",
      yLabel: "f - min f",
      axes: opts.axes,
      guides: opts.guides,
    },
    data.curves,
    data.bands,
  );
  if (opts.out) {
    writeFileSync(opts.out, svg);
  }
  return svg;
}

export function main(argv: string[]): number {
  const parsed = yargs(argv)
    .option("input", { type: "string", array: true, default: [] as string[],
      describe: "trace CSV paths or globs (per-run curves)" })
    .option("stats", { type: "string",
      describe: "sweep_stats.json for mean curves with 95% bands" })
    .option("summary", { type: "string",
      describe: "summary.json carrying the reference optimum" })
    .option("field", { choices: ["f_last", "f_avg"] as const, default: "f_avg" as GapField })
    .option("axes", { choices: ["loglog", "loglinear"] as const, default: "loglog" as const })
    .option("out", { type: "string", describe: "output SVG path" })
    .option("dump-series", { type: "string",
      describe: "also write the parsed plot data series as JSON" })
    .option("guides", { type: "string", default: "",
      describe: "comma-separated reference slopes, e.g. -0.5,-1" })
    .option("title", { type: "string" })
    .strict()
    .parseSync();

  const opts: CliOptions = {
    input: parsed.input,
    stats: parsed.stats,
    summary: parsed.summary,
    field: parsed.field as GapField,
    axes: parsed.axes,
    out: parsed.out,
    dumpSeries: parsed["dump-series"],
    guides: parsed.guides === "" ? [] : parsed.guides.split(",").map(Number),
    title: parsed.title,
  };
  try {
    run(opts);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error in ${err.file}: ${err.message}`);
    } else {
      console.error((err as Error).message);
    }
    return 1;
  }
}

const invokedDirectly = process.argv[1] !== undefined
  && import.meta.url.endsWith(basename(process.argv[1]!));
if (invokedDirectly) {
  process.exit(main(hideBin(process.argv)));
}
