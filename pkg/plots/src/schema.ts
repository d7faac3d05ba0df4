/**
 * Parsers for the benchmark harness output formats.
 *
 * Trace CSV: one `#`-prefixed JSON metadata line, a fixed header
 * `t,f_last,f_avg,gamma,rho_sq,div_to_opt,wallclock_ns`, then one row per
 * iteration (`div_to_opt` and `wallclock_ns` may be empty).  Summary and
 * sweep-stats files are plain JSON.  Schema mismatches raise SchemaError
 * carrying the offending file's name.
 */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export const TRACE_HEADER = "t,f_last,f_avg,gamma,rho_sq,div_to_opt,wallclock_ns";

export class SchemaError extends Error {
  readonly file: string;

  constructor(file: string, message: string) {
    super(`${file}: ${message}`);
    this.file = file;
  }
}

export interface TraceRow {
  t: number;
  fLast: number;
  fAvg: number;
  gamma: number;
  rhoSq: number;
  divToOpt: number | null;
  wallclockNs: number | null;
}

export interface TraceFile {
  file: string;
  solver: string;
  seed: number | null;
  meta: Record<string, unknown>;
  rows: TraceRow[];
}

export interface SummaryFile {
  file: string;
  fStar: number | null;
  raw: Record<string, unknown>;
}

export interface SeriesStats {
  mean: number[];
  ci95: number[];
}

export interface SweepSolverStats {
  horizon: number;
  numSeeds: number;
  t: number[];
  fLast: SeriesStats;
  fAvg: SeriesStats;
}

export interface SweepStatsFile {
  file: string;
  fStar: number | null;
  solvers: Map<string, SweepSolverStats>;
}

function requireNumber(file: string, cell: string, line: number): number {
  const value = Number(cell);
  if (cell === "" || !Number.isFinite(value)) {
    throw new SchemaError(file, `non-numeric value ${JSON.stringify(cell)} on row ${line}`);
  }
  return value;
}

export function parseTraceCsv(text: string, file: string): TraceFile {
  let meta: Record<string, unknown> = {};
  let body = text;
  if (text.startsWith("#")) {
    const eol = text.indexOf("\n");
    const comment = text.slice(1, eol === -1 ? undefined : eol).trim();
    try {
      meta = JSON.parse(comment) as Record<string, unknown>;
    } catch {
      throw new SchemaError(file, "metadata comment line is not valid JSON");
    }
    body = eol === -1 ? "" : text.slice(eol + 1);
  }
  const headerEnd = body.indexOf("\n");
  const header = (headerEnd === -1 ? body : body.slice(0, headerEnd)).trim();
  if (header !== TRACE_HEADER) {
    throw new SchemaError(file, `expected header ${TRACE_HEADER!}, got ${header}`);
  }
  const parsed = Papa.parse<string[]>(body.slice(headerEnd + 1).trim(), {
    delimiter: ",",
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]!;
    throw new SchemaError(file, `CSV parse error: ${first.message}`);
  }
  const rows: TraceRow[] = parsed.data.map((cells, i) => {
    if (cells.length !== 7) {
      throw new SchemaError(file, `expected 7 columns, got ${cells.length} on row ${i + 1}`);
    }
    return {
      t: requireNumber(file, cells[0]!, i + 1),
      fLast: requireNumber(file, cells[1]!, i + 1),
      fAvg: requireNumber(file, cells[2]!, i + 1),
      gamma: requireNumber(file, cells[3]!, i + 1),
      rhoSq: requireNumber(file, cells[4]!, i + 1),
      divToOpt: cells[5] === "" ? null : requireNumber(file, cells[5]!, i + 1),
      wallclockNs: cells[6] === "" ? null : requireNumber(file, cells[6]!, i + 1),
    };
  });
  if (rows.length === 0) {
    throw new SchemaError(file, "trace has no rows");
  }
  return {
    file,
    solver: typeof meta.solver === "string" ? meta.solver : "unknown",
    seed: extractSeed(meta),
    meta,
    rows,
  };
}

function extractSeed(meta: Record<string, unknown>): number | null {
  const oracle = meta.oracle as Record<string, unknown> | undefined;
  if (oracle && typeof oracle.seed === "number") return oracle.seed;
  const config = meta.config as Record<string, unknown> | undefined;
  if (config && typeof config.seed === "number") return config.seed;
  return null;
}

export function loadTraceCsv(path: string): TraceFile {
  return parseTraceCsv(readFileSync(path, "utf-8"), path);
}

export function loadSummary(path: string): SummaryFile {
  let raw: Record<string, unknown>;
  try {
    raw = JSON.parse(readFileSync(path, "utf-8")) as Record<string, unknown>;
  } catch (err) {
    throw new SchemaError(path, `not valid JSON (${(err as Error).message})`);
  }
  const fStar = typeof raw.f_star === "number" ? raw.f_star : null;
  return { file: path, fStar, raw };
}

function toSeriesStats(file: string, value: unknown, label: string): SeriesStats {
  const obj = value as { mean?: unknown; ci95?: unknown } | undefined;
  if (!obj || !Array.isArray(obj.mean) || !Array.isArray(obj.ci95)) {
    throw new SchemaError(file, `solver ${label} is missing mean/ci95 arrays`);
  }
  return { mean: obj.mean as number[], ci95: obj.ci95 as number[] };
}

export function loadSweepStats(path: string): SweepStatsFile {
  let raw: Record<string, unknown>;
  try {
    raw = JSON.parse(readFileSync(path, "utf-8")) as Record<string, unknown>;
  } catch (err) {
    throw new SchemaError(path, `not valid JSON (${(err as Error).message})`);
  }
  const solversRaw = raw.solvers as Record<string, Record<string, unknown>> | undefined;
  if (!solversRaw) {
    throw new SchemaError(path, "missing 'solvers' section");
  }
  const solvers = new Map<string, SweepSolverStats>();
  for (const [label, agg] of Object.entries(solversRaw)) {
    if (!Array.isArray(agg.t)) {
      throw new SchemaError(path, `solver ${label} is missing the iteration axis`);
    }
    solvers.set(label, {
      horizon: Number(agg.horizon),
      numSeeds: Number(agg.num_seeds),
      t: agg.t as number[],
      fLast: toSeriesStats(path, agg.f_last, label),
      fAvg: toSeriesStats(path, agg.f_avg, label),
    });
  }
  const fStar = typeof raw.f_star === "number" ? raw.f_star : null;
  return { file: path, fStar, solvers };
}
