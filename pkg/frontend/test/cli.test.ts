import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterEach, describe, expect, it, vi } from "vitest";

import { main } from "../src/cli.js";

const FIXTURES = fileURLToPath(new URL("./fixtures", import.meta.url));

function outDir(): string {
  return mkdtempSync(join(tmpdir(), "plots-out-"));
}

afterEach(() => {
  vi.restoreAllMocks();
});

describe("render", () => {
  it("regenerates all three figure kinds from simulator CSVs", () => {
    const dir = outDir();
    const jobs: Array<[string, string[]]> = [
      ["tradeoff.svg", ["--kind", "tradeoff",
        "--csv", join(FIXTURES, "sweep_ae.csv"),
        "--csv", join(FIXTURES, "sweep_baseline.csv")]],
      ["beampattern.svg", ["--kind", "beampattern",
        "--csv", join(FIXTURES, "beampattern_ae_omega0.09.csv"),
        "--csv", join(FIXTURES, "beampattern_baseline_rho1.csv")]],
      ["calibration.svg", ["--kind", "calibration",
        "--csv", join(FIXTURES, "sweep_baseline.csv")]],
    ];
    for (const [name, args] of jobs) {
      const out = join(dir, name);
      expect(main(["render", ...args, "--out", out])).toBe(0);
      expect(readFileSync(out, "utf8")).toMatch(/^<svg /);
    }
    // the contract bits: log-scaled SER ticks and the reference diagonal
    expect(readFileSync(join(dir, "tradeoff.svg"), "utf8")).toContain(">0.01<");
    expect(readFileSync(join(dir, "calibration.svg"), "utf8")).toContain('stroke-dasharray="6 4"');
  });

  it("writes identical bytes for identical inputs", () => {
    const dir = outDir();
    const args = ["render", "--kind", "beampattern",
      "--csv", join(FIXTURES, "beampattern_baseline_rho1.csv")];
    main([...args, "--out", join(dir, "a.svg")]);
    main([...args, "--out", join(dir, "b.svg")]);
    expect(readFileSync(join(dir, "a.svg"), "utf8")).toBe(readFileSync(join(dir, "b.svg"), "utf8"));
  });

  it("honours --ser-scale linear", () => {
    const dir = outDir();
    const out = join(dir, "linear.svg");
    const code = main(["render", "--kind", "tradeoff",
      "--csv", join(FIXTURES, "sweep_baseline.csv"),
      "--ser-scale", "linear", "--out", out]);
    expect(code).toBe(0);
    expect(readFileSync(out, "utf8")).toMatch(/^<svg /);
  });
});

describe("validation", () => {
  it("rejects an unknown command and an unknown kind", () => {
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    expect(main(["paint", "--kind", "tradeoff", "--out", "x.svg"])).toBe(1);
    expect(main(["render", "--kind", "heatmap", "--out", "x.svg"])).toBe(1);
    expect(err).toHaveBeenCalledWith(expect.stringContaining("--kind must be one of"));
  });

  it("requires --out and at least one --csv", () => {
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    expect(main(["render", "--kind", "tradeoff", "--csv", "a.csv"])).toBe(1);
    expect(main(["render", "--kind", "tradeoff", "--out", join(outDir(), "x.svg")])).toBe(1);
    expect(err).toHaveBeenCalledWith(expect.stringContaining("--out is required"));
    expect(err).toHaveBeenCalledWith(expect.stringContaining("at least one --csv"));
  });

  it("reports a missing file and a schema mismatch by name", () => {
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    const out = join(outDir(), "x.svg");
    expect(main(["render", "--kind", "tradeoff", "--csv", "no-such.csv", "--out", out])).toBe(1);
    expect(err).toHaveBeenCalledWith(expect.stringContaining("csv not found: no-such.csv"));
    // a results file is not a beampattern file
    expect(main(["render", "--kind", "beampattern",
      "--csv", join(FIXTURES, "sweep_ae.csv"), "--out", out])).toBe(1);
    expect(err).toHaveBeenCalledWith(expect.stringContaining('missing column "angle_deg"'));
  });
});
