/**
 * Versioned CSV schema of the walksearch harness and a strict parser for it.
 *
 * Files start with a version comment line, then a header row whose columns
 * must match RECORD_COLUMNS exactly; any deviation raises a SchemaError
 * naming the offending columns.
 */

import Papa from "papaparse";

export const CSV_VERSION_LINE = "# walksearch-csv v1";

export const RECORD_COLUMNS = [
  "side",
  "N",
  "algo",
  "delta",
  "steps",
  "time_steps_charged",
  "marked_probability",
  "overlap_target",
  "alpha_predicted",
  "alpha_dense",
  "T_predicted",
  "T_peak_empirical",
  "wall_clock",
] as const;

export interface ExperimentRecord {
  side: number;
  n: number;
  algo: string;
  delta: number;
  steps: number;
  timeStepsCharged: number;
  markedProbability: number;
  overlapTarget: number;
  alphaPredicted: number;
  alphaDense: number | null;
  tPredicted: number;
  tPeakEmpirical: number;
  wallClock: number;
}

export class SchemaError extends Error {}

function num(row: Record<string, string>, column: string, line: number): number {
  const value = Number(row[column]);
  if (!Number.isFinite(value)) {
    throw new SchemaError(`row ${line}: column "${column}" is not a number: "${row[column]}"`);
  }
  return value;
}

export function parseRecords(text: string): ExperimentRecord[] {
  const newline = text.indexOf("\n");
  const first = (newline < 0 ? text : text.slice(0, newline)).trim();
  if (first !== CSV_VERSION_LINE) {
    throw new SchemaError(
      `expected version line "${CSV_VERSION_LINE}", got "${first.slice(0, 40)}"`,
    );
  }
  const body = text.slice(newline + 1);
  const parsed = Papa.parse<Record<string, string>>(body, {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new SchemaError(`CSV parse error at row ${e.row}: ${e.message}`);
  }
  const header = parsed.meta.fields ?? [];
  const expected = [...RECORD_COLUMNS];
  const missing = expected.filter((c) => !header.includes(c));
  const extra = header.filter((c) => !expected.includes(c as never));
  if (missing.length > 0 || extra.length > 0) {
    const parts = [];
    if (missing.length > 0) parts.push(`missing columns: ${missing.join(", ")}`);
    if (extra.length > 0) parts.push(`unexpected columns: ${extra.join(", ")}`);
    throw new SchemaError(parts.join("; "));
  }
  if (parsed.data.length === 0) {
    throw new SchemaError("no data rows");
  }
  return parsed.data.map((row, i) => ({
    side: num(row, "side", i),
    n: num(row, "N", i),
    algo: row["algo"],
    delta: num(row, "delta", i),
    steps: num(row, "steps", i),
    timeStepsCharged: num(row, "time_steps_charged", i),
    markedProbability: num(row, "marked_probability", i),
    overlapTarget: num(row, "overlap_target", i),
    alphaPredicted: num(row, "alpha_predicted", i),
    alphaDense: row["alpha_dense"] === "" ? null : num(row, "alpha_dense", i),
    tPredicted: num(row, "T_predicted", i),
    tPeakEmpirical: num(row, "T_peak_empirical", i),
    wallClock: num(row, "wall_clock", i),
  }));
}

/** Tuning constant of a controlled-walk record: cos(delta) * sqrt(ln N). */
export function cDeltaOf(record: ExperimentRecord): number {
  return Math.round(Math.cos(record.delta) * Math.sqrt(Math.log(record.n)) * 1e9) / 1e9;
}
