/**
 * The three figure kinds rendered from harness records.
 *
 * Every plotted number comes straight from the CSV (or the summary JSON's
 * declared fit constants); no physics is recomputed here.
 */

import { ExperimentRecord } from "./schema.js";
import { Summary, composite, costPoints, scalingConstant } from "./summary.js";
import { PALETTE, Scene, makeScale, plotRange } from "./svg.js";

export type FigureKind = "evolution" | "peak-vs-N" | "cost-scaling";

export interface PlotSpec {
  kind: FigureKind;
  algo?: string;
  side?: number;
  summary?: Summary | null;
}

/** Window rows of the best-success series for one algo at one side. */
export function evolutionSeries(
  records: ExperimentRecord[],
  algo: string,
  side: number,
): { steps: number[]; probs: number[]; delta: number } {
  const rows = records.filter((r) => r.algo === algo && r.side === side);
  if (rows.length === 0) {
    throw new Error(`no ${algo} rows at side ${side}`);
  }
  const byDelta = new Map<number, ExperimentRecord[]>();
  for (const r of rows) {
    const list = byDelta.get(r.delta) ?? [];
    list.push(r);
    byDelta.set(r.delta, list);
  }
  let best: ExperimentRecord[] = [];
  let bestPeak = -1;
  for (const list of byDelta.values()) {
    const peak = Math.max(...list.map((r) => r.markedProbability));
    if (peak > bestPeak) {
      bestPeak = peak;
      best = list;
    }
  }
  best.sort((a, b) => a.steps - b.steps);
  return {
    steps: best.map((r) => r.steps),
    probs: best.map((r) => r.markedProbability),
    delta: best[0].delta,
  };
}

function renderEvolution(records: ExperimentRecord[], spec: PlotSpec): string {
  const algo = spec.algo ?? "controlled";
  const side = spec.side ?? Math.max(...records.filter((r) => r.algo === algo).map((r) => r.side));
  const { steps, probs, delta } = evolutionSeries(records, algo, side);
  const range = plotRange();
  const x = makeScale("linear", [Math.min(...steps), Math.max(...steps)], range.x);
  const y = makeScale("linear", [0, Math.max(...probs)], range.y);
  const scene = new Scene();
  scene.title(`${algo} success probability, side ${side} (delta = ${delta.toFixed(4)})`);
  scene.xAxis(x, "iterations");
  scene.yAxis(y, "marked-site probability");
  scene.polyline(steps.map((s) => x(s)), probs.map((p) => y(p)), PALETTE[algo] ?? "black");
  for (let i = 0; i < steps.length; i++) {
    scene.circle(x(steps[i]), y(probs[i]), PALETTE[algo] ?? "black", 2);
  }
  return scene.render();
}

/** Peak success probability per side for one algo (best delta series). */
export function peakSeries(
  records: ExperimentRecord[],
  algo: string,
): { sides: number[]; peaks: number[] } {
  const rows = records.filter((r) => r.algo === algo);
  const sides = [...new Set(rows.map((r) => r.side))].sort((a, b) => a - b);
  const peaks = sides.map((side) =>
    Math.max(...rows.filter((r) => r.side === side).map((r) => r.markedProbability)),
  );
  return { sides, peaks };
}

function renderPeakVsN(records: ExperimentRecord[]): string {
  const algos = [...new Set(records.map((r) => r.algo))].sort();
  const range = plotRange();
  const ns = records.map((r) => r.n);
  const x = makeScale("log", [Math.min(...ns), Math.max(...ns)], range.x);
  const y = makeScale("linear", [0, 1], range.y);
  const distinctNs = [...new Set(ns)].sort((a, b) => a - b);
  const scene = new Scene();
  scene.title("peak success probability vs lattice size");
  scene.xAxis(x, "N", distinctNs);
  scene.yAxis(y, "peak probability");
  for (const algo of algos) {
    const { sides, peaks } = peakSeries(records, algo);
    const color = PALETTE[algo] ?? "black";
    scene.polyline(sides.map((s) => x(s * s)), peaks.map((p) => y(p)), color);
    sides.forEach((s, i) => scene.circle(x(s * s), y(peaks[i]), color));
  }
  scene.legend(algos.map((a) => [a, PALETTE[a] ?? "black"]));
  return scene.render();
}

function renderCostScaling(records: ExperimentRecord[], spec: PlotSpec): string {
  const present = ["controlled", "akr+qaa"].filter((a) =>
    records.some((r) => r.algo === a),
  );
  if (present.length === 0) {
    throw new Error("cost-scaling figure needs controlled or akr+qaa rows");
  }
  const range = plotRange();
  const ns = records.map((r) => r.n);
  const nLo = Math.min(...ns);
  const nHi = Math.max(...ns);
  const x = makeScale("log", [nLo, nHi], range.x);

  const series = present.map((algo) => {
    const points = costPoints(records, algo);
    const c = scalingConstant(algo, records, spec.summary ?? null);
    return { algo, points, c };
  });
  const allCosts = series.flatMap(({ points }) => [...points.values()]);
  const y = makeScale("log", [Math.min(...allCosts) / 2, Math.max(...allCosts) * 2], range.y);

  const scene = new Scene();
  scene.title("total time steps vs lattice size");
  scene.xAxis(x, "N", [...new Set(ns)].sort((a, b) => a - b));
  scene.yAxis(y, "time steps");
  const legend: Array<[string, string]> = [];
  const dashed = new Set<string>();
  for (const { algo, points, c } of series) {
    const color = PALETTE[algo] ?? "black";
    const sides = [...points.keys()].sort((a, b) => a - b);
    sides.forEach((s) => scene.circle(x(s * s), y(points.get(s)!), color, 3.5));
    // fitted one-parameter curve c * composite(N), sampled densely in log N
    const fitXs: number[] = [];
    const fitYs: number[] = [];
    for (let i = 0; i <= 64; i++) {
      const n = nLo * Math.pow(nHi / nLo, i / 64);
      fitXs.push(x(n));
      fitYs.push(y(c * composite(algo, n)));
    }
    const label = algo === "akr+qaa" ? "fit c2*sqrt(N)*ln(N)" : "fit c1*sqrt(N*ln(N))";
    scene.polyline(fitXs, fitYs, color, "6 3");
    legend.push([algo, color], [label, color]);
    dashed.add(label);
  }
  scene.legend(legend, dashed);
  return scene.render();
}

export function renderFigure(records: ExperimentRecord[], spec: PlotSpec): string {
  switch (spec.kind) {
    case "evolution":
      return renderEvolution(records, spec);
    case "peak-vs-N":
      return renderPeakVsN(records);
    case "cost-scaling":
      return renderCostScaling(records, spec);
  }
}
