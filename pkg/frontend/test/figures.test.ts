import { readFileSync, readdirSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { mergeTables, parseCsv } from "../src/csv.js";
import { FigureKind, renderFigure } from "../src/figures.js";
import { ScaleError, linearTicks, logTicks, makeScale } from "../src/svg.js";

const FIXTURES = join(__dirname, "fixtures");

interface ManifestEntry {
  preset: string;
  kind: FigureKind;
  csvs: string[];
}

function loadPreset(entry: ManifestEntry) {
  const tables = entry.csvs.map((name) =>
    parseCsv(readFileSync(join(FIXTURES, entry.preset, name), "utf-8"), name)
  );
  return mergeTables(tables);
}

const manifest: ManifestEntry[] = JSON.parse(
  readFileSync(join(FIXTURES, "manifest.json"), "utf-8")
);

describe("scales", () => {
  it("log scale rejects nonpositive bounds", () => {
    expect(() => makeScale("log", 0, 1, 0, 100)).toThrow(ScaleError);
    expect(() => makeScale("log", -1, 1, 0, 100)).toThrow(ScaleError);
  });

  it("log scale maps decades evenly", () => {
    const s = makeScale("log", 1e-4, 1, 0, 100);
    expect(s.toPx(1e-4)).toBeCloseTo(0);
    expect(s.toPx(1e-2)).toBeCloseTo(50);
    expect(s.toPx(1)).toBeCloseTo(100);
  });

  it("tick generators cover the range", () => {
    expect(linearTicks(0, 10)).toContain(0);
    expect(logTicks(1e-3, 1)).toEqual([1e-3, 1e-2, 1e-1, 1]);
  });
});

describe("renderFigure on every shipped preset fixture", () => {
  for (const entry of manifest) {
    it(`${entry.preset} renders as ${entry.kind}`, () => {
      const svg = renderFigure(loadPreset(entry), { kind: entry.kind });
      expect(svg.startsWith("<svg")).toBe(true);
      expect(svg).toContain("</svg>");
    });
  }

  it("error-curve figures carry one labeled curve per truncation", () => {
    for (const entry of manifest.filter((e) => e.kind === "error-curves")) {
      const table = loadPreset(entry);
      const svg = renderFigure(table, { kind: entry.kind });
      for (const trunc of table.truncations) {
        expect(svg).toContain(`data-label="${trunc}"`);
        expect(svg).toContain(`class="legend">${trunc}<`);
      }
      const curves = svg.match(/<polyline /g) ?? [];
      expect(curves.length).toBe(table.truncations.length);
    }
  });
});

describe("renderFigure behavior", () => {
  const quad = manifest.find((e) => e.preset === "quad_square")!;

  it("is deterministic (same bytes on re-render)", () => {
    const table = loadPreset(quad);
    const a = renderFigure(table, { kind: "trajectory-axes" });
    const b = renderFigure(table, { kind: "trajectory-axes" });
    expect(a).toBe(b);
  });

  it("reports the offending column on schema mismatch", () => {
    const table = parseCsv("t,quantity,truncation,value\n0,e_nu_pct,nu2,0.5");
    expect(() => renderFigure(table, { kind: "control-actions" })).toThrow(/"thrust"/);
  });

  it("rejects a log scale when nothing is positive", () => {
    const table = parseCsv(
      ["t,quantity,truncation,value", "0,e_nu_pct,nu2,0.0", "1,e_nu_pct,nu2,0.0"].join("\n")
    );
    expect(() => renderFigure(table, { kind: "error-curves" })).toThrow(ScaleError);
  });

  it("drops the zero-valued t=0 sample on log axes instead of failing", () => {
    const table = parseCsv(
      ["t,quantity,truncation,value", "0,e_nu_pct,nu2,0.0", "1,e_nu_pct,nu2,1e-3"].join("\n")
    );
    const svg = renderFigure(table, { kind: "error-curves" });
    expect(svg).toContain("data-label=\"nu2\"");
  });

  it("handles full-length series (1e5 samples) without stack overflow", () => {
    const rows = ["t,quantity,truncation,value"];
    for (let i = 0; i <= 100_000; i++) {
      rows.push(`${i * 1e-3},e_nu_pct,nu2,${1e-8 * (i + 1)}`);
    }
    const svg = renderFigure(parseCsv(rows.join("\n")), { kind: "error-curves" });
    expect(svg).toContain('data-label="nu2"');
  });

  it("orders truncation legends numerically", () => {
    const rows = ["t,quantity,truncation,value"];
    for (const trunc of ["nu10", "nu2", "nu3"]) {
      rows.push(`0,e_nu_pct,${trunc},1e-3`, `1,e_nu_pct,${trunc},2e-3`);
    }
    const svg = renderFigure(parseCsv(rows.join("\n")), { kind: "error-curves" });
    const order = [...svg.matchAll(/data-label="(nu\d+)"/g)].map((m) => m[1]);
    expect(order).toEqual(["nu2", "nu3", "nu10"]);
  });
});
