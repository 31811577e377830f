#!/usr/bin/env node
/**
 * render --kind {tradeoff,beampattern,calibration} --csv PATH [--csv PATH2] --out PATH
 *
 * One figure per invocation.  --ser-scale {log,linear} controls the symbol
 * error rate axis of the tradeoff figure (default log).  Exit code 1 covers
 * both usage and data problems; the message says which.
 */

import { parseArgs } from "node:util";
import { fileURLToPath } from "node:url";
import { resolve } from "node:path";

import { FIGURE_KINDS, FigureKind, PlotSpec, render } from "./render.js";

const USAGE =
  "usage: isacsim-plots render --kind {tradeoff,beampattern,calibration} " +
  "--csv PATH [--csv PATH2 ...] --out PATH [--ser-scale {log,linear}]";

function parseSpec(argv: string[]): PlotSpec {
  const command = argv[0];
  if (command !== "render") {
    throw new Error(`unknown command "${command ?? ""}"\n${USAGE}`);
  }
  const { values } = parseArgs({
    args: argv.slice(1),
    options: {
      kind: { type: "string" },
      csv: { type: "string", multiple: true },
      out: { type: "string" },
      "ser-scale": { type: "string", default: "log" },
    },
    allowPositionals: false,
  });
  const kind = values.kind as string | undefined;
  if (!kind || !(FIGURE_KINDS as readonly string[]).includes(kind)) {
    throw new Error(`--kind must be one of ${FIGURE_KINDS.join(", ")}\n${USAGE}`);
  }
  if (!values.out) {
    throw new Error(`--out is required\n${USAGE}`);
  }
  const serScale = values["ser-scale"];
  if (serScale !== "log" && serScale !== "linear") {
    throw new Error(`--ser-scale must be log or linear\n${USAGE}`);
  }
  return {
    kind: kind as FigureKind,
    csvPaths: values.csv ?? [],
    out: values.out,
    serScale,
  };
}

export function main(argv: string[]): number {
  try {
    const spec = parseSpec(argv);
    render(spec);
    console.log(`wrote ${spec.out}`);
    return 0;
  } catch (error) {
    console.error(`isacsim-plots: ${(error as Error).message}`);
    return 1;
  }
}

const invokedPath = process.argv[1] ? resolve(process.argv[1]) : "";
if (invokedPath && fileURLToPath(import.meta.url) === invokedPath) {
  process.exitCode = main(process.argv.slice(2));
}
