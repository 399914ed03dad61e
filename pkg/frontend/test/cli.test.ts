import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { run } from "../src/main.js";

const FIXTURES = join(__dirname, "fixtures");

function tmp(name: string): string {
  return join(mkdtempSync(join(tmpdir(), "kplots-")), name);
}

describe("cli run()", () => {
  it("renders an error-curves figure from two truncation files", () => {
    const out = tmp("fig.svg");
    const code = run([
      "--kind", "error-curves",
      "--csv", join(FIXTURES, "fig1", "fig1__nu2.csv"),
      "--csv", join(FIXTURES, "fig1", "fig1__nu4.csv"),
      "--out", out,
    ]);
    expect(code).toBe(0);
    const svg = readFileSync(out, "utf-8");
    expect(svg).toContain('data-label="nu2"');
    expect(svg).toContain('data-label="nu4"');
  });

  it("renders the quad figures", () => {
    for (const kind of ["trajectory-3d", "trajectory-axes", "control-actions", "residual"]) {
      const out = tmp(`${kind}.svg`);
      const code = run([
        "--kind", kind,
        "--csv", join(FIXTURES, "quad_square", "quad_square__run.csv"),
        "--out", out,
      ]);
      expect(code).toBe(0);
      expect(existsSync(out)).toBe(true);
    }
  });

  it("fails without writing on an empty csv", () => {
    const empty = tmp("empty.csv");
    writeFileSync(empty, "t,quantity,truncation,value\n");
    const out = tmp("nope.svg");
    const code = run(["--kind", "error-curves", "--csv", empty, "--out", out]);
    expect(code).toBe(1);
    expect(existsSync(out)).toBe(false);
  });

  it("rejects unknown kinds and missing flags", () => {
    expect(run(["--kind", "pie-chart", "--csv", "x", "--out", "y"])).toBe(1);
    expect(run(["--kind", "residual"])).toBe(1);
  });
});
