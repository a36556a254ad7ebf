import Papa from "papaparse";

/** One aggregate row; numeric fields are null when the CSV cell is empty. */
export interface AggregateRow {
  algorithm: string;
  n: number;
  t0: number;
  lambda: number;
  eps1: number | null;
  eps2: number | null;
  delta: number | null;
  mean_rmse_post: number;
  ci_half_width: number;
  theory_bound: number | null;
}

export class SchemaError extends Error {}

const REQUIRED_COLUMNS = [
  "algorithm",
  "n",
  "t0",
  "lambda",
  "eps1",
  "eps2",
  "delta",
  "mean_rmse_post",
  "ci_half_width",
];

function parseNumber(raw: string | undefined): number | null {
  if (raw === undefined || raw === "") return null;
  const value = Number(raw);
  if (!Number.isFinite(value)) throw new SchemaError(`non-numeric value: ${raw}`);
  return value;
}

function requireNumber(raw: string | undefined, column: string): number {
  const value = parseNumber(raw);
  if (value === null) throw new SchemaError(`empty value in required column ${column}`);
  return value;
}

/** Parse one aggregate CSV, checking the harness column contract. */
export function parseAggregateCsv(text: string, needTheory = false): AggregateRow[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`CSV parse error: ${parsed.errors[0].message}`);
  }
  const fields = parsed.meta.fields ?? [];
  const required = needTheory ? [...REQUIRED_COLUMNS, "theory_bound"] : REQUIRED_COLUMNS;
  for (const column of required) {
    if (!fields.includes(column)) {
      throw new SchemaError(`missing column: ${column}`);
    }
  }
  return parsed.data.map((row) => ({
    algorithm: row.algorithm,
    n: requireNumber(row.n, "n"),
    t0: requireNumber(row.t0, "t0"),
    lambda: requireNumber(row.lambda, "lambda"),
    eps1: parseNumber(row.eps1),
    eps2: parseNumber(row.eps2),
    delta: parseNumber(row.delta),
    mean_rmse_post: requireNumber(row.mean_rmse_post, "mean_rmse_post"),
    ci_half_width: requireNumber(row.ci_half_width, "ci_half_width"),
    theory_bound: parseNumber(row.theory_bound),
  }));
}

/** One series of a dataset CSV (donor rows plus an optional target row). */
export interface DatasetSeries {
  id: string;
  values: number[];
}

/** Parse the dataset CSV form: header donor_id,t1..tT, one series per row. */
export function parseDatasetCsv(text: string): DatasetSeries[] {
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`CSV parse error: ${parsed.errors[0].message}`);
  }
  const rows = parsed.data;
  if (rows.length < 2 || rows[0][0] !== "donor_id") {
    throw new SchemaError("missing column: donor_id");
  }
  return rows.slice(1).map((row) => ({
    id: row[0],
    values: row.slice(1).map((cell, i) => {
      const value = Number(cell);
      if (!Number.isFinite(value)) {
        throw new SchemaError(`non-numeric value in row ${row[0]}, column t${i + 1}`);
      }
      return value;
    }),
  }));
}
