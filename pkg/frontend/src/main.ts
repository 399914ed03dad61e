#!/usr/bin/env node
/**
 * CLI: render one figure from harness CSV output.
 *
 * Usage:
 *   kooplift-plots --kind error-curves --csv run__nu2.csv --csv run__nu4.csv \
 *       --out fig.svg [--quantity e_nu_pct] [--y-scale log|linear] [--title ...]
 *
 * Exit codes: 0 written, 1 bad input (schema mismatch, empty CSV, bad flags).
 * On error no output file is written.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { basename } from "node:path";
import { mergeTables, parseCsv } from "./csv.js";
import { FigureKind, PlotSpec, renderFigure } from "./figures.js";

const KINDS: FigureKind[] = [
  "error-curves",
  "trajectory-3d",
  "trajectory-axes",
  "control-actions",
  "residual",
];

interface Args {
  kind: FigureKind;
  csv: string[];
  out: string;
  quantity?: string;
  yScale?: "linear" | "log";
  title?: string;
}

function usage(): string {
  return (
    "usage: kooplift-plots --kind <" +
    KINDS.join("|") +
    "> --csv FILE [--csv FILE ...] --out FILE.svg" +
    " [--quantity NAME] [--y-scale log|linear] [--title TEXT]"
  );
}

function parseArgs(argv: string[]): Args {
  const out: Partial<Args> & { csv: string[] } = { csv: [] };
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const next = () => {
      i++;
      if (i >= argv.length) throw new Error(`missing value after ${flag}`);
      return argv[i];
    };
    switch (flag) {
      case "--kind": {
        const k = next();
        if (!KINDS.includes(k as FigureKind)) {
          throw new Error(`unknown kind "${k}"; expected one of ${KINDS.join(", ")}`);
        }
        out.kind = k as FigureKind;
        break;
      }
      case "--csv":
        out.csv.push(next());
        break;
      case "--out":
        out.out = next();
        break;
      case "--quantity":
        out.quantity = next();
        break;
      case "--y-scale": {
        const v = next();
        if (v !== "log" && v !== "linear") throw new Error(`bad --y-scale "${v}"`);
        out.yScale = v;
        break;
      }
      case "--title":
        out.title = next();
        break;
      case "--help":
      case "-h":
        console.log(usage());
        process.exit(0);
        break;
      default:
        throw new Error(`unknown flag "${flag}"`);
    }
  }
  if (!out.kind) throw new Error("--kind is required");
  if (out.csv.length === 0) throw new Error("at least one --csv is required");
  if (!out.out) throw new Error("--out is required");
  return out as Args;
}

export function run(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`${(err as Error).message}\n${usage()}`);
    return 1;
  }
  try {
    const tables = args.csv.map((path) => parseCsv(readFileSync(path, "utf-8"), basename(path)));
    const table = mergeTables(tables);
    const spec: PlotSpec = {
      kind: args.kind,
      quantity: args.quantity,
      yScale: args.yScale,
      title: args.title,
    };
    const svg = renderFigure(table, spec);
    writeFileSync(args.out, svg, "utf-8");
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

const isMain = process.argv[1] !== undefined &&
  import.meta.url.endsWith(basename(process.argv[1]));
if (isMain) {
  process.exit(run(process.argv.slice(2)));
}
