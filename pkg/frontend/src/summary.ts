/**
 * Harness summary JSON (fit constants) and the declared one-parameter
 * scaling model cost = c * composite used for the overlay curves.
 *
 * When no summary file is supplied the constant is re-fit from the CSV with
 * the same model: c = geometric mean of cost / composite.
 */

import { ExperimentRecord } from "./schema.js";

export const SUMMARY_SCHEMA = "walksearch-summary v1";

export interface AlgoSummary {
  sides: number[];
  composite: string;
  cost_over_composite: number[];
}

export interface Summary {
  schema: string;
  algos: Record<string, AlgoSummary>;
}

export function parseSummary(text: string): Summary {
  const data = JSON.parse(text) as Summary;
  if (data.schema !== SUMMARY_SCHEMA) {
    throw new Error(`expected summary schema "${SUMMARY_SCHEMA}", got "${data.schema}"`);
  }
  return data;
}

export function composite(algo: string, n: number): number {
  const lnN = Math.log(n);
  return algo === "akr+qaa" ? Math.sqrt(n) * lnN : Math.sqrt(n * lnN);
}

function geometricMean(values: number[]): number {
  const logSum = values.reduce((acc, v) => acc + Math.log(v), 0);
  return Math.exp(logSum / values.length);
}

/** Charged cost at the empirical peak for every side of one algo series. */
export function costPoints(records: ExperimentRecord[], algo: string): Map<number, number> {
  const out = new Map<number, number>();
  const sides = [...new Set(records.filter((r) => r.algo === algo).map((r) => r.side))];
  for (const side of sides.sort((a, b) => a - b)) {
    const rows = records.filter((r) => r.algo === algo && r.side === side);
    const best = rows.reduce((a, b) => (b.markedProbability > a.markedProbability ? b : a));
    if (algo === "akr+qaa") {
      out.set(side, best.timeStepsCharged);
      continue;
    }
    out.set(side, 2 * side + 2 * Math.round(Math.abs(best.tPeakEmpirical)));
  }
  return out;
}

/** Fit constant of cost = c * composite, from the summary or from the CSV. */
export function scalingConstant(
  algo: string,
  records: ExperimentRecord[],
  summary: Summary | null,
): number {
  if (summary && summary.algos[algo]) {
    return geometricMean(summary.algos[algo].cost_over_composite);
  }
  const points = costPoints(records, algo);
  const ratios: number[] = [];
  for (const [side, cost] of points) {
    ratios.push(cost / composite(algo, side * side));
  }
  if (ratios.length === 0) {
    throw new Error(`no ${algo} rows to fit`);
  }
  return geometricMean(ratios);
}
