/**
 * Readers for the schema v1 CSV/JSONL files produced by the experiment CLI.
 *
 * Every CSV starts with a comment line `# schema v1 columns: a,b,c` followed
 * by a standard header row; empty cells mean "not applicable" and map to
 * null.  JSONL files carry one record per line with native types.
 */

import { readFileSync } from "fs";
import Papa from "papaparse";

export class SchemaError extends Error {}

export interface RawTable {
  columns: string[];
  rows: Record<string, string>[];
}

const SCHEMA_RE = /^# schema v1 columns: (.*)$/;

export function parseSchemaCsv(text: string): RawTable {
  const firstLine = text.split(/\r?\n/, 1)[0] ?? "";
  const m = SCHEMA_RE.exec(firstLine);
  if (!m) {
    throw new SchemaError(
      `missing "# schema v1 columns:" header (got: ${firstLine.slice(0, 60)})`,
    );
  }
  const columns = m[1].split(",");
  const body = text.slice(firstLine.length + 1);
  const parsed = Papa.parse<Record<string, string>>(body.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`CSV parse error: ${parsed.errors[0].message}`);
  }
  const header = parsed.meta.fields ?? [];
  if (header.join(",") !== columns.join(",")) {
    throw new SchemaError(
      `header row ${header.join(",")} does not match schema line ${columns.join(",")}`,
    );
  }
  return { columns, rows: parsed.data };
}

export function readSchemaFile(path: string): RawTable {
  const text = readFileSync(path, "utf-8");
  if (path.endsWith(".jsonl")) {
    const rows = text
      .split(/\r?\n/)
      .filter((line) => line.trim().length > 0)
      .map((line) => JSON.parse(line) as Record<string, unknown>);
    const columns = rows.length > 0 ? Object.keys(rows[0]) : [];
    // normalize to the string-cell representation the CSV path produces
    const strRows = rows.map((r) => {
      const out: Record<string, string> = {};
      for (const [k, v] of Object.entries(r)) {
        out[k] = v === null ? "" : String(v);
      }
      return out;
    });
    return { columns, rows: strRows };
  }
  return parseSchemaCsv(text);
}

function requireColumns(table: RawTable, needed: string[], what: string): void {
  for (const col of needed) {
    if (!table.columns.includes(col)) {
      throw new SchemaError(`${what}: missing column "${col}"`);
    }
  }
}

export function cellNumber(row: Record<string, string>, col: string): number | null {
  const raw = row[col];
  if (raw === undefined || raw === "") return null;
  if (raw === "inf" || raw === "Infinity") return Infinity;
  const v = Number(raw);
  if (Number.isNaN(v)) throw new SchemaError(`non-numeric cell ${col}=${raw}`);
  return v;
}

export function cellBool(row: Record<string, string>, col: string): boolean {
  const raw = (row[col] ?? "").toLowerCase();
  if (raw === "true") return true;
  if (raw === "false") return false;
  throw new SchemaError(`non-boolean cell ${col}=${row[col]}`);
}

// ---------------------------------------------------------------------------
// typed record views
// ---------------------------------------------------------------------------

export interface BracketRecord {
  envSeed: string;
  t: number;
  lower: number | null;
  upper: number | null;
  oracle: number | null;
  mcEstimate: number | null;
  expQuenchedUpperScale: number | null;
  expQuenchedLowerScale: number | null;
  expAnnealed: number | null;
}

const BRACKET_COLUMNS = [
  "env_seed", "t", "lower", "upper", "oracle", "mc_estimate",
  "exp_quenched_upper_scale", "exp_quenched_lower_scale", "exp_annealed",
];

export function bracketRecords(table: RawTable): BracketRecord[] {
  requireColumns(table, BRACKET_COLUMNS, "bracket input");
  return table.rows.map((row) => ({
    envSeed: row.env_seed,
    t: cellNumber(row, "t") ?? NaN,
    lower: cellNumber(row, "lower"),
    upper: cellNumber(row, "upper"),
    oracle: cellNumber(row, "oracle"),
    mcEstimate: cellNumber(row, "mc_estimate"),
    expQuenchedUpperScale: cellNumber(row, "exp_quenched_upper_scale"),
    expQuenchedLowerScale: cellNumber(row, "exp_quenched_lower_scale"),
    expAnnealed: cellNumber(row, "exp_annealed"),
  }));
}

export interface TailRecord {
  n: number;
  pHat: number | null;
  ciHi: number | null;
  censored: boolean;
  gDeltaN: number;
  negLogRatio: number | null;
}

const TAIL_COLUMNS = ["n", "p_hat", "ci_hi", "censored", "g_delta_n", "neg_log_ratio"];

export function tailRecords(table: RawTable): TailRecord[] {
  requireColumns(table, TAIL_COLUMNS, "tail input");
  return table.rows.map((row) => ({
    n: cellNumber(row, "n") ?? NaN,
    pHat: cellNumber(row, "p_hat"),
    ciHi: cellNumber(row, "ci_hi"),
    censored: cellBool(row, "censored"),
    gDeltaN: cellNumber(row, "g_delta_n") ?? NaN,
    negLogRatio: cellNumber(row, "neg_log_ratio"),
  }));
}

export interface TailFit {
  law: { variant: string; params: Record<string, number>; scale_m: number };
  n_usable: number;
  envelope_c?: number;
  log_slope?: number;
  ratio_min?: number;
  ratio_max?: number;
}

export function readTailFit(path: string): TailFit {
  const fit = JSON.parse(readFileSync(path, "utf-8")) as TailFit;
  if (!fit.law || typeof fit.law.variant !== "string") {
    throw new SchemaError(`${path}: not a tail fit file (missing law)`);
  }
  return fit;
}

export interface RateRecord {
  t: number;
  h: number;
  m: Record<string, number | null>;
  expAnnealed: number | null;
  lawVariant: string;
  lawAlpha: number | null;
}

const RATE_M_MODES = ["g_inv_minus", "g_inv_plus", "g_inv", "u_rho", "v_c"];
const RATE_COLUMNS = ["t", "law", "h", ...RATE_M_MODES.map((m) => `m_${m}`), "exp_annealed"];

export function rateRecords(table: RawTable): RateRecord[] {
  requireColumns(table, RATE_COLUMNS, "rates input");
  return table.rows.map((row) => {
    const law = JSON.parse(row.law) as { variant: string; params: Record<string, number> };
    const m: Record<string, number | null> = {};
    for (const mode of RATE_M_MODES) m[mode] = cellNumber(row, `m_${mode}`);
    return {
      t: cellNumber(row, "t") ?? NaN,
      h: cellNumber(row, "h") ?? NaN,
      m,
      expAnnealed: cellNumber(row, "exp_annealed"),
      lawVariant: law.variant,
      lawAlpha: law.params.alpha ?? null,
    };
  });
}
