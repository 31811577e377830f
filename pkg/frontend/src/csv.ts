/**
 * Strict readers for the two CSV schemas the simulator writes.
 *
 * Results files (trade-off sweeps, single evaluations) and beampattern files
 * are both plain comma-separated text with a header row and no quoting.
 * Empty cells mean "not applicable" (the writer puts nothing where a value
 * was None, e.g. the RMSE of a run with no detected targets) and parse to
 * null.  A missing column or a non-numeric cell is an error naming the
 * column, so a schema drift fails loudly instead of rendering garbage.
 */

import { readFileSync } from "node:fs";

export interface ResultRow {
  knobKind: string; // "omega_r" for the learned system, "rho_phi" for the benchmark
  knobValue1: number;
  knobValue2: number | null;
  ser: number;
  pd: number;
  pfaEmp: number;
  rmseRad: number | null;
  meanSigmaHat: number | null;
  nTrials: number;
  seed: number;
}

export interface BeampatternRow {
  angleDeg: number;
  eDb: number;
}

const RESULTS_COLUMNS = [
  "knob_kind",
  "knob_value_1",
  "knob_value_2",
  "ser",
  "pd",
  "pfa_emp",
  "rmse_rad",
  "mean_sigma_hat",
  "n_trials",
  "seed",
] as const;

const BEAMPATTERN_COLUMNS = ["angle_deg", "e_db"] as const;

interface Table {
  /** Column name -> index in each row. */
  index: Map<string, number>;
  rows: string[][];
}

function readTable(path: string, required: readonly string[]): Table {
  const text = readFileSync(path, "utf8");
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error(`${path}: empty file`);
  }
  const header = (lines[0] as string).split(",");
  const index = new Map(header.map((name, i) => [name, i]));
  for (const name of required) {
    if (!index.has(name)) {
      throw new Error(`${path}: missing column "${name}"`);
    }
  }
  const rows = lines.slice(1).map((line) => line.split(","));
  return { index, rows };
}

function cell(table: Table, row: number, column: string): string {
  const i = table.index.get(column) as number;
  return (table.rows[row] as string[])[i] ?? "";
}

function num(table: Table, row: number, column: string, path: string): number {
  const raw = cell(table, row, column);
  const value = Number(raw);
  if (raw === "" || !Number.isFinite(value)) {
    throw new Error(`${path} row ${row + 2}: column "${column}" is not a number: "${raw}"`);
  }
  return value;
}

function numOrNull(table: Table, row: number, column: string, path: string): number | null {
  if (cell(table, row, column) === "") {
    return null;
  }
  return num(table, row, column, path);
}

export function readResults(path: string): ResultRow[] {
  const table = readTable(path, RESULTS_COLUMNS);
  return table.rows.map((_, r) => ({
    knobKind: cell(table, r, "knob_kind"),
    knobValue1: num(table, r, "knob_value_1", path),
    knobValue2: numOrNull(table, r, "knob_value_2", path),
    ser: num(table, r, "ser", path),
    pd: num(table, r, "pd", path),
    pfaEmp: num(table, r, "pfa_emp", path),
    rmseRad: numOrNull(table, r, "rmse_rad", path),
    meanSigmaHat: numOrNull(table, r, "mean_sigma_hat", path),
    nTrials: num(table, r, "n_trials", path),
    seed: num(table, r, "seed", path),
  }));
}

export function readBeampattern(path: string): BeampatternRow[] {
  const table = readTable(path, BEAMPATTERN_COLUMNS);
  return table.rows.map((_, r) => ({
    angleDeg: num(table, r, "angle_deg", path),
    eDb: num(table, r, "e_db", path),
  }));
}
