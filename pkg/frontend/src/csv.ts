/**
 * Sweep CSV contract (schema v1).
 *
 * Header: scenario,algorithm,nodes,ocs,size_mb,mode,cct_us,reconfigs,status,wall_s
 * Rows that did not solve keep their grid coordinates but carry an empty
 * cct_us / reconfigs and a status explaining why (e.g. "infeasible: ...").
 */

import Papa from "papaparse";

export const REQUIRED_COLUMNS = [
  "scenario",
  "algorithm",
  "nodes",
  "ocs",
  "size_mb",
  "mode",
  "cct_us",
  "reconfigs",
  "status",
  "wall_s",
] as const;

export interface SweepRow {
  scenario: string;
  algorithm: string;
  nodes: number;
  ocs: number;
  sizeMb: number;
  mode: string;
  /** null when the point did not solve (infeasible or error). */
  cctUs: number | null;
  reconfigs: number | null;
  status: string;
  wallS: number;
}

/** Any violation of the CSV contract: missing columns, bad numbers, no rows. */
export class CsvError extends Error {}

function requireNumber(
  raw: string | undefined,
  line: number,
  column: string,
): number {
  const value = Number(raw);
  if (raw === undefined || raw.trim() === "" || !Number.isFinite(value)) {
    throw new CsvError(
      `row ${line}: column ${column} is not a number (got ${JSON.stringify(raw ?? "")})`,
    );
  }
  return value;
}

function optionalNumber(
  raw: string | undefined,
  line: number,
  column: string,
): number | null {
  if (raw === undefined || raw.trim() === "") {
    return null;
  }
  return requireNumber(raw, line, column);
}

export function parseSweepCsv(text: string): SweepRow[] {
  const parsed = Papa.parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]!;
    throw new CsvError(`CSV parse error: ${first.message}`);
  }
  const fields = parsed.meta.fields ?? [];
  const missing = REQUIRED_COLUMNS.filter((c) => !fields.includes(c));
  if (missing.length > 0) {
    throw new CsvError(`missing columns: ${missing.join(", ")}`);
  }
  if (parsed.data.length === 0) {
    throw new CsvError("no data rows");
  }
  return parsed.data.map((record, index) => {
    const line = index + 2; // 1-based, after the header line
    return {
      scenario: record.scenario ?? "",
      algorithm: record.algorithm ?? "",
      nodes: requireNumber(record.nodes, line, "nodes"),
      ocs: requireNumber(record.ocs, line, "ocs"),
      sizeMb: requireNumber(record.size_mb, line, "size_mb"),
      mode: record.mode ?? "",
      cctUs: optionalNumber(record.cct_us, line, "cct_us"),
      reconfigs: optionalNumber(record.reconfigs, line, "reconfigs"),
      status: record.status ?? "",
      wallS: requireNumber(record.wall_s, line, "wall_s"),
    };
  });
}
