#!/usr/bin/env node
/**
 * plot --in results.csv --kind cost-scaling --out fig.svg [--summary summary.json]
 *
 * Renders one of the three figure kinds to a deterministic SVG.  Nothing is
 * written on error; schema problems exit nonzero with a column diagnostic.
 */

import { readFileSync, writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { renderFigure, FigureKind } from "./figures.js";
import { parseRecords, SchemaError } from "./schema.js";
import { parseSummary } from "./summary.js";

export function run(argv: string[]): number {
  const args = yargs(argv)
    .scriptName("walksearch-plot")
    .option("in", { type: "string", demandOption: true, describe: "harness CSV" })
    .option("kind", {
      choices: ["evolution", "peak-vs-N", "cost-scaling"] as const,
      demandOption: true,
    })
    .option("out", { type: "string", demandOption: true, describe: "output SVG path" })
    .option("summary", { type: "string", describe: "harness summary JSON with fit constants" })
    .option("algo", { type: "string", describe: "series for the evolution figure" })
    .option("side", { type: "number", describe: "lattice side for the evolution figure" })
    .strict()
    .exitProcess(false)
    .fail((msg) => {
      throw new Error(msg);
    })
    .parseSync();

  const text = readFileSync(args.in, "utf8");
  const records = parseRecords(text);
  const summary = args.summary ? parseSummary(readFileSync(args.summary, "utf8")) : null;
  const svg = renderFigure(records, {
    kind: args.kind as FigureKind,
    algo: args.algo,
    side: args.side,
    summary,
  });
  writeFileSync(args.out, svg);
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop()!);

if (invokedDirectly) {
  try {
    process.exit(run(hideBin(process.argv)));
  } catch (err) {
    const prefix = err instanceof SchemaError ? "schema error" : "error";
    console.error(`${prefix}: ${(err as Error).message}`);
    process.exit(1);
  }
}
