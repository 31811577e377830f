/**
 * The three figure kinds, each a pure function from parsed rows to an SVG
 * string: the trade-off plane (symbol error rate against detection
 * probability and against angle RMSE), transmit beampatterns in dB, and the
 * uncertainty calibration scatter with its RMSE = sigma reference diagonal.
 *
 * Figures display what the CSVs contain and never recompute statistics.
 */

import { BeampatternRow, ResultRow } from "./csv.js";
import { linearScale, logScale, padded, Scale, tickLabel } from "./scales.js";
import { polyline, px, svgDocument, tag, textEl } from "./svg.js";

export type SerScale = "log" | "linear";

const SERIES_COLOR: Record<string, string> = {
  rho_phi: "#7f7f7f",
  omega_r: "#d62728",
};

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"];

const AXIS = "#333333";
const GRID = "#dddddd";

interface Panel {
  x: number;
  y: number;
  w: number;
  h: number;
}

function xRange(p: Panel): [number, number] {
  return [p.x, p.x + p.w];
}

function yRange(p: Panel): [number, number] {
  return [p.y + p.h, p.y]; // SVG y grows downward
}

function frame(p: Panel): string {
  return tag("rect", {
    x: p.x, y: p.y, width: p.w, height: p.h,
    fill: "none", stroke: AXIS, "stroke-width": 1,
  });
}

function xAxis(p: Panel, scale: Scale, label: string): string {
  const parts: string[] = [];
  for (const t of scale.ticks) {
    const x = scale.map(t);
    parts.push(tag("line", { x1: x, y1: p.y, x2: x, y2: p.y + p.h, stroke: GRID }));
    parts.push(tag("line", { x1: x, y1: p.y + p.h, x2: x, y2: p.y + p.h + 4, stroke: AXIS }));
    parts.push(textEl(x, p.y + p.h + 16, tickLabel(t), { "text-anchor": "middle", fill: AXIS }));
  }
  parts.push(textEl(p.x + p.w / 2, p.y + p.h + 34, label, { "text-anchor": "middle", fill: AXIS }));
  return parts.join("");
}

function yAxis(p: Panel, scale: Scale, label: string, withLabels = true): string {
  const parts: string[] = [];
  for (const t of scale.ticks) {
    const y = scale.map(t);
    parts.push(tag("line", { x1: p.x, y1: y, x2: p.x + p.w, y2: y, stroke: GRID }));
    parts.push(tag("line", { x1: p.x - 4, y1: y, x2: p.x, y2: y, stroke: AXIS }));
    if (withLabels) {
      parts.push(textEl(p.x - 7, y + 4, tickLabel(t), { "text-anchor": "end", fill: AXIS }));
    }
  }
  if (label) {
    parts.push(
      textEl(0, 0, label, {
        "text-anchor": "middle", fill: AXIS,
        transform: `translate(${px(p.x - 44)} ${px(p.y + p.h / 2)}) rotate(-90)`,
      }),
    );
  }
  return parts.join("");
}

/** Display name for one knob kind; unknown kinds keep their raw name. */
function seriesLabel(kind: string): string {
  if (kind === "omega_r") return "end-to-end";
  if (kind === "rho_phi") return "benchmark";
  return kind;
}

function seriesColor(kind: string, i: number): string {
  return SERIES_COLOR[kind] ?? (PALETTE[i % PALETTE.length] as string);
}

function marker(kind: string, x: number, y: number, color: string): string {
  if (kind === "rho_phi") {
    return tag("circle", { cx: x, cy: y, r: 3, fill: "white", stroke: color, "stroke-width": 1.2 });
  }
  return tag("circle", { cx: x, cy: y, r: 3.2, fill: color });
}

function lineSwatch(color: string, dash?: string): (x: number, y: number) => string {
  return (x, y) => {
    const attrs: Record<string, string | number> = {
      x1: x, y1: y, x2: x + 14, y2: y, stroke: color, "stroke-width": 2,
    };
    if (dash) {
      attrs["stroke-dasharray"] = dash;
    }
    return tag("line", attrs);
  };
}

interface LegendEntry {
  label: string;
  swatch(x: number, y: number): string;
}

function legend(x: number, y: number, entries: LegendEntry[]): string {
  const parts: string[] = [];
  let cx = x;
  for (const { label, swatch } of entries) {
    parts.push(swatch(cx, y));
    parts.push(textEl(cx + 19, y + 4, label, { fill: AXIS }));
    cx += 19 + 7 * label.length + 24;
  }
  return parts.join("");
}

/** Stable series order: benchmark first, then end-to-end, then anything else. */
function groupByKind(rows: ResultRow[]): Array<[string, ResultRow[]]> {
  const order = ["rho_phi", "omega_r"];
  const groups = new Map<string, ResultRow[]>();
  for (const row of rows) {
    const list = groups.get(row.knobKind) ?? [];
    list.push(row);
    groups.set(row.knobKind, list);
  }
  return [...groups.entries()].sort((a, b) => {
    const ia = order.indexOf(a[0]);
    const ib = order.indexOf(b[0]);
    return (ia < 0 ? order.length : ia) - (ib < 0 ? order.length : ib) || a[0].localeCompare(b[0]);
  });
}

function serScaleFor(rows: ResultRow[], mode: SerScale, range: [number, number]): Scale {
  if (mode === "linear") {
    return linearScale(padded(0, Math.max(...rows.map((r) => r.ser))), range);
  }
  const positive = rows.map((r) => r.ser).filter((s) => s > 0);
  if (positive.length === 0) {
    throw new Error("log-scaled SER axis needs at least one positive SER value");
  }
  return logScale([Math.min(...positive) / 1.5, Math.max(...positive) * 1.5], range);
}

/** Trade-off plane: SER over Pd on the left, SER over angle RMSE on the right. */
export function tradeoffSvg(rows: ResultRow[], serScale: SerScale = "log"): string {
  if (rows.length === 0) {
    throw new Error("tradeoff figure needs at least one result row");
  }
  const left: Panel = { x: 62, y: 36, w: 320, h: 316 };
  const right: Panel = { x: 444, y: 36, w: 320, h: 316 };
  const sy = serScaleFor(rows, serScale, yRange(left));
  const sxPd = linearScale([0, 1], xRange(left), 5);
  const withRmse = rows.filter((r) => r.rmseRad !== null);
  const rmseMax = withRmse.length > 0 ? Math.max(...withRmse.map((r) => r.rmseRad as number)) : 1;
  const sxRmse = linearScale([0, rmseMax * 1.08], xRange(right), 5);

  const parts: string[] = [];
  parts.push(xAxis(left, sxPd, "detection probability"));
  parts.push(yAxis(left, sy, "symbol error rate"));
  parts.push(xAxis(right, sxRmse, "angle RMSE [rad]"));
  parts.push(yAxis(right, sy, "", false));

  const entries: LegendEntry[] = [];
  groupByKind(rows).forEach(([kind, group], i) => {
    const color = seriesColor(kind, i);
    for (const row of group) {
      if (serScale === "log" && row.ser <= 0) {
        continue; // not representable on a log axis
      }
      parts.push(marker(kind, sxPd.map(row.pd), sy.map(row.ser), color));
      if (row.rmseRad !== null) {
        parts.push(marker(kind, sxRmse.map(row.rmseRad), sy.map(row.ser), color));
      }
    }
    entries.push({ label: seriesLabel(kind), swatch: (x, y) => marker(kind, x + 7, y, color) });
  });
  parts.push(frame(left), frame(right));
  parts.push(legend(left.x, 18, entries));
  return svgDocument(828, 404, parts.join(""));
}

/** One polyline per input file; the CSV's energy column is already in dB. */
export function beampatternSvg(series: Array<{ label: string; rows: BeampatternRow[] }>): string {
  if (series.length === 0 || series.every((s) => s.rows.length === 0)) {
    throw new Error("beampattern figure needs at least one row");
  }
  const panel: Panel = { x: 62, y: 36, w: 540, h: 316 };
  const peak = Math.max(...series.flatMap((s) => s.rows.map((r) => r.eDb)));
  const top = Math.ceil(peak / 10) * 10;
  const floor = top - 50; // display floor; deeper nulls clamp to the frame bottom
  const sx = linearScale([-90, 90], xRange(panel));
  sx.ticks = [-90, -60, -30, 0, 30, 60, 90];
  const sy = linearScale([floor, top], yRange(panel), 5);

  const parts: string[] = [];
  parts.push(xAxis(panel, sx, "angle [deg]"));
  parts.push(yAxis(panel, sy, "radiated energy [dB]"));
  const entries: LegendEntry[] = [];
  series.forEach(({ label, rows }, i) => {
    const color = PALETTE[i % PALETTE.length] as string;
    const pts = rows.map((r): [number, number] => [
      sx.map(r.angleDeg),
      sy.map(Math.max(r.eDb, floor)),
    ]);
    parts.push(polyline(pts, { stroke: color, "stroke-width": 1.5 }));
    entries.push({ label, swatch: lineSwatch(color) });
  });
  parts.push(frame(panel));
  parts.push(legend(panel.x, 18, entries));
  return svgDocument(664, 404, parts.join(""));
}

/**
 * Reported angle uncertainty against realized RMSE, one point per row, with
 * the dashed RMSE = sigma diagonal; both axes share one domain so the
 * diagonal is the 45-degree line.
 */
export function calibrationSvg(rows: ResultRow[]): string {
  const usable = rows.filter((r) => r.rmseRad !== null && r.meanSigmaHat !== null);
  if (usable.length === 0) {
    throw new Error("calibration figure needs rows with both rmse_rad and mean_sigma_hat");
  }
  const panel: Panel = { x: 72, y: 36, w: 340, h: 340 };
  const top = Math.max(...usable.flatMap((r) => [r.rmseRad as number, r.meanSigmaHat as number])) * 1.12;
  const sx = linearScale([0, top], xRange(panel), 5);
  const sy = linearScale([0, top], yRange(panel), 5);

  const parts: string[] = [];
  parts.push(xAxis(panel, sx, "mean reported σ̂ [rad]"));
  parts.push(yAxis(panel, sy, "angle RMSE [rad]"));
  parts.push(
    tag("line", {
      x1: sx.map(0), y1: sy.map(0), x2: sx.map(top), y2: sy.map(top),
      stroke: "#444444", "stroke-dasharray": "6 4",
    }),
  );
  const entries: LegendEntry[] = [];
  groupByKind(usable).forEach(([kind, group], i) => {
    const color = seriesColor(kind, i);
    for (const row of group) {
      const x = sx.map(row.meanSigmaHat as number);
      const y = sy.map(row.rmseRad as number);
      parts.push(marker(kind, x, y, color));
      const knobName = kind === "omega_r" ? "ω" : kind === "rho_phi" ? "ρ" : kind;
      parts.push(textEl(x + 6, y - 6, `${knobName}=${row.knobValue1}`, { fill: AXIS, "font-size": 10 }));
    }
    entries.push({ label: seriesLabel(kind), swatch: (x, y) => marker(kind, x + 7, y, color) });
  });
  entries.push({ label: "RMSE = σ̂", swatch: lineSwatch("#444444", "4 3") });
  parts.push(frame(panel));
  parts.push(legend(panel.x, 18, entries));
  return svgDocument(452, 428, parts.join(""));
}
