/**
 * Batch entry point: sweep CSV in, one SVG per algorithm plus stats.txt out.
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { CsvError, parseSweepCsv } from "./csv.js";
import type { PlotSpec } from "./chart.js";
import { renderAlgorithmChart } from "./chart.js";
import { computeReductions, formatStats } from "./stats.js";

export interface RenderResult {
  charts: { algorithm: string; path: string }[];
  statsPath: string;
  notes: string[];
}

export function render(spec: PlotSpec): RenderResult {
  let text: string;
  try {
    text = readFileSync(spec.input, "utf8");
  } catch (err) {
    throw new CsvError(`cannot read ${spec.input}: ${(err as Error).message}`);
  }
  const rows = parseSweepCsv(text);
  mkdirSync(spec.outDir, { recursive: true });

  const algorithms = [...new Set(rows.map((r) => r.algorithm))].sort();
  const charts: RenderResult["charts"] = [];
  const notes: string[] = [];
  for (const algorithm of algorithms) {
    const subset = rows.filter((r) => r.algorithm === algorithm);
    const { svg, notes: chartNotes } = renderAlgorithmChart(
      algorithm,
      subset,
      spec.xAxis,
      spec.logLog,
    );
    const path = join(spec.outDir, `${algorithm}.svg`);
    writeFileSync(path, svg);
    charts.push({ algorithm, path });
    notes.push(...chartNotes.map((n) => `${algorithm}: ${n}`));
  }

  const statsPath = join(spec.outDir, "stats.txt");
  writeFileSync(statsPath, formatStats(computeReductions(rows)));
  return { charts, statsPath, notes };
}
