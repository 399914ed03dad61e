/**
 * Parser for the harness CSV schema.
 *
 * Every results file is long-format with the fixed header
 *
 *     t,quantity,truncation,value
 *
 * and one row per (time sample, quantity). A file may carry one truncation
 * (validation runs) or a single pseudo-truncation like "quad" (closed-loop
 * logs). Values may be `nan` where a series stopped being defined (diverged
 * model, reconstruction stop); renderers skip non-finite points.
 */

export interface SeriesKey {
  quantity: string;
  truncation: string;
}

export interface Series {
  quantity: string;
  truncation: string;
  t: number[];
  values: number[];
}

/** Parsed file: series indexed by `${truncation}/${quantity}`. */
export interface ResultTable {
  series: Map<string, Series>;
  truncations: string[];
  quantities: string[];
}

export class CsvSchemaError extends Error {}

const HEADER = ["t", "quantity", "truncation", "value"];

export function parseCsv(text: string, source = "<csv>"): ResultTable {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new CsvSchemaError(`${source}: empty file`);
  }
  const header = lines[0].split(",").map((c) => c.trim());
  for (let i = 0; i < HEADER.length; i++) {
    if (header[i] !== HEADER[i]) {
      throw new CsvSchemaError(
        `${source}: expected column ${i + 1} to be "${HEADER[i]}", got "${header[i] ?? ""}"`
      );
    }
  }
  if (lines.length === 1) {
    throw new CsvSchemaError(`${source}: no data rows`);
  }

  const series = new Map<string, Series>();
  for (let ln = 1; ln < lines.length; ln++) {
    const cells = lines[ln].split(",");
    if (cells.length !== 4) {
      throw new CsvSchemaError(`${source}:${ln + 1}: expected 4 cells, got ${cells.length}`);
    }
    const t = Number(cells[0]);
    const value = Number(cells[3]);
    if (Number.isNaN(t)) {
      throw new CsvSchemaError(`${source}:${ln + 1}: unparseable time "${cells[0]}"`);
    }
    const quantity = cells[1];
    const truncation = cells[2];
    const key = `${truncation}/${quantity}`;
    let s = series.get(key);
    if (!s) {
      s = { quantity, truncation, t: [], values: [] };
      series.set(key, s);
    }
    s.t.push(t);
    s.values.push(value);
  }

  const truncations = [...new Set([...series.values()].map((s) => s.truncation))];
  const quantities = [...new Set([...series.values()].map((s) => s.quantity))];
  return { series, truncations, quantities };
}

/** Merge several parsed files (e.g. one per truncation) into one table. */
export function mergeTables(tables: ResultTable[]): ResultTable {
  const series = new Map<string, Series>();
  for (const tbl of tables) {
    for (const [key, s] of tbl.series) {
      if (series.has(key)) {
        throw new CsvSchemaError(`duplicate series "${key}" across input files`);
      }
      series.set(key, s);
    }
  }
  const truncations = [...new Set([...series.values()].map((s) => s.truncation))];
  const quantities = [...new Set([...series.values()].map((s) => s.quantity))];
  return { series, truncations, quantities };
}

/** Fetch one series or fail naming the missing column. */
export function requireSeries(table: ResultTable, truncation: string, quantity: string): Series {
  const s = table.series.get(`${truncation}/${quantity}`);
  if (!s) {
    throw new CsvSchemaError(
      `missing series: quantity "${quantity}" for truncation "${truncation}"`
    );
  }
  return s;
}
