/** PlotSpec: which CSVs become which figure, and where the SVG goes. */

import { existsSync, writeFileSync } from "node:fs";
import { basename } from "node:path";

import { readBeampattern, readResults } from "./csv.js";
import { beampatternSvg, calibrationSvg, SerScale, tradeoffSvg } from "./figures.js";

export const FIGURE_KINDS = ["tradeoff", "beampattern", "calibration"] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface PlotSpec {
  kind: FigureKind;
  csvPaths: string[];
  out: string;
  serScale: SerScale;
}

/** Build the figure for a spec without touching the output path. */
export function buildFigure(spec: PlotSpec): string {
  if (spec.csvPaths.length === 0) {
    throw new Error("at least one --csv is required");
  }
  for (const path of spec.csvPaths) {
    if (!existsSync(path)) {
      throw new Error(`csv not found: ${path}`);
    }
  }
  switch (spec.kind) {
    case "tradeoff":
      return tradeoffSvg(spec.csvPaths.flatMap(readResults), spec.serScale);
    case "calibration":
      return calibrationSvg(spec.csvPaths.flatMap(readResults));
    case "beampattern":
      return beampatternSvg(
        spec.csvPaths.map((path) => ({
          label: basename(path).replace(/\.csv$/, ""),
          rows: readBeampattern(path),
        })),
      );
  }
}

export function render(spec: PlotSpec): void {
  writeFileSync(spec.out, buildFigure(spec));
}
