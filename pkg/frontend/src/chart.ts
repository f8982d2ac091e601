/**
 * SVG line charts for sweep results: CCT against message size or cluster
 * size, one chart per collective algorithm, one line per policy series.
 *
 * Series are the four policy families (one-shot, strawman, ideal, swot,
 * plus oracle when present); when the CSV carries several values of the
 * non-plotted dimension, each family splits into one line per value
 * (e.g. "swot p8" and "swot p16"). Points without a solved CCT are
 * omitted from the line and counted in an annotation; families with no
 * feasible point at all are dropped with a note.
 */

import type { SweepRow } from "./csv.js";

export const X_AXES = ["size_mb", "nodes"] as const;
export type XAxis = (typeof X_AXES)[number];

export interface PlotSpec {
  /** Input sweep CSV path. */
  input: string;
  xAxis: XAxis;
  /** Plot both axes on logarithmic scales. */
  logLog: boolean;
  /** Output directory: one <algorithm>.svg per algorithm plus stats.txt. */
  outDir: string;
}

export interface ChartResult {
  svg: string;
  notes: string[];
}

const EXPECTED_FAMILIES = ["oneshot", "strawman", "ideal", "swot"] as const;

const FAMILY_OF_MODE: Record<string, string> = {
  oneshot: "oneshot",
  strawman: "strawman",
  ideal: "ideal",
  "swot-exact": "swot",
  "swot-heuristic": "swot",
  oracle: "oracle",
};

const FAMILY_COLORS: Record<string, string> = {
  oneshot: "#1f77b4",
  strawman: "#d62728",
  ideal: "#7f7f7f",
  swot: "#2ca02c",
  oracle: "#9467bd",
};

const SUB_DASHES = ["", "7 4", "2 3", "9 3 2 3", "4 4"];

const WIDTH = 760;
const PLOT = { left: 72, top: 46, right: 580, bottom: 400 };
const LEGEND_X = PLOT.right + 16;

interface Series {
  family: string;
  /** Value of the non-plotted dimension, NaN when it does not split. */
  subValue: number;
  label: string;
  points: { x: number; y: number }[];
  omitted: number;
}

function familyOf(mode: string): string {
  return FAMILY_OF_MODE[mode] ?? mode;
}

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

function fmt(value: number): string {
  return value.toFixed(2);
}

/** Shortest decimal that round-trips, for tick labels. */
function label(value: number): string {
  return String(value);
}

function buildSeries(rows: SweepRow[], xAxis: XAxis): Series[] {
  const xOf = (r: SweepRow) => (xAxis === "size_mb" ? r.sizeMb : r.nodes);
  const subOf = (r: SweepRow) => (xAxis === "size_mb" ? r.nodes : r.sizeMb);
  const subValues = [...new Set(rows.map(subOf))].sort((a, b) => a - b);
  const split = subValues.length > 1;

  const families = [...EXPECTED_FAMILIES] as string[];
  for (const row of rows) {
    const fam = familyOf(row.mode);
    if (!families.includes(fam)) {
      families.push(fam);
    }
  }

  const series: Series[] = [];
  for (const family of families) {
    for (const subValue of subValues) {
      const bucket = rows.filter(
        (r) => familyOf(r.mode) === family && subOf(r) === subValue,
      );
      const xs = [...new Set(bucket.map(xOf))].sort((a, b) => a - b);
      const points: { x: number; y: number }[] = [];
      let omitted = 0;
      for (const x of xs) {
        const here = bucket.filter((r) => xOf(r) === x);
        // within a family, prefer the earlier mode in declaration order
        // (swot-exact over swot-heuristic) among rows that solved
        const solved = here.find((r) => r.cctUs !== null);
        if (solved && solved.cctUs !== null) {
          points.push({ x, y: solved.cctUs });
        } else {
          omitted += 1;
        }
      }
      const subLabel =
        xAxis === "size_mb" ? `p${subValue}` : `${subValue}MB`;
      series.push({
        family,
        subValue,
        label: split ? `${family} ${subLabel}` : family,
        points,
        omitted,
      });
    }
  }
  return series;
}

interface Scale {
  pos(value: number): number;
  ticks: number[];
}

function makeScale(
  values: number[],
  log: boolean,
  rangeLo: number,
  rangeHi: number,
  tickHint: number[] | null,
): Scale {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    lo = lo === 0 ? -1 : lo * 0.9;
    hi = hi === 0 ? 1 : hi * 1.1;
  }
  const t = (v: number) => (log ? Math.log(v) : v);
  const span = t(hi) - t(lo);
  const pos = (v: number) =>
    rangeLo + ((t(v) - t(lo)) / span) * (rangeHi - rangeLo);

  let ticks: number[];
  if (tickHint) {
    ticks = tickHint;
  } else if (log) {
    ticks = [];
    for (
      let d = Math.ceil(Math.log10(lo) - 1e-9);
      d <= Math.floor(Math.log10(hi) + 1e-9);
      d++
    ) {
      ticks.push(10 ** d);
    }
    if (ticks.length < 2) {
      ticks = niceTicks(lo, hi);
    }
  } else {
    ticks = niceTicks(lo, hi);
  }
  return { pos, ticks: ticks.filter((v) => v >= lo - 1e-9 && v <= hi + 1e-9) };
}

function niceTicks(lo: number, hi: number): number[] {
  const rawStep = (hi - lo) / 5;
  const mag = 10 ** Math.floor(Math.log10(rawStep));
  const norm = rawStep / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step / 2; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

export function renderAlgorithmChart(
  algorithm: string,
  rows: SweepRow[],
  xAxis: XAxis,
  logLog: boolean,
): ChartResult {
  const notes: string[] = [];
  const all = buildSeries(rows, xAxis);
  const drawn = all.filter((s) => s.points.length > 0);

  const seen = new Set<string>();
  for (const s of all) {
    if (s.points.length === 0 && !seen.has(s.family)) {
      const feasibleAnywhere = all.some(
        (o) => o.family === s.family && o.points.length > 0,
      );
      if (!feasibleAnywhere) {
        seen.add(s.family);
        notes.push(`series ${s.family}: no feasible rows, dropped`);
      }
    }
  }
  for (const s of drawn) {
    if (s.omitted > 0) {
      notes.push(
        `series ${s.label}: ${s.omitted} infeasible point${
          s.omitted === 1 ? "" : "s"
        } omitted`,
      );
    }
  }

  const xValues = drawn.flatMap((s) => s.points.map((p) => p.x));
  const yValues = drawn.flatMap((s) => s.points.map((p) => p.y));
  const footer = notes.length * 16 + (notes.length > 0 ? 10 : 0);
  const height = PLOT.bottom + 56 + footer;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" ` +
      `height="${height}" viewBox="0 0 ${WIDTH} ${height}" ` +
      `font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${height}" fill="white"/>`);
  const xName = xAxis === "size_mb" ? "message size (MB)" : "nodes";
  parts.push(
    `<text x="${(PLOT.left + PLOT.right) / 2}" y="24" text-anchor="middle" ` +
      `font-size="15">${esc(algorithm)}: CCT vs ${esc(xName)}` +
      `${logLog ? " (log-log)" : ""}</text>`,
  );

  if (drawn.length === 0) {
    parts.push(
      `<text x="${(PLOT.left + PLOT.right) / 2}" y="${
        (PLOT.top + PLOT.bottom) / 2
      }" text-anchor="middle" fill="#888">no feasible data</text>`,
    );
  } else {
    const xTicks = [...new Set(xValues)].sort((a, b) => a - b);
    const xScale = makeScale(
      xValues,
      logLog,
      PLOT.left,
      PLOT.right,
      xTicks.length <= 12 ? xTicks : xTicks.filter((_, i) => i % 2 === 0),
    );
    const yScale = makeScale(yValues, logLog, PLOT.bottom, PLOT.top, null);

    for (const tick of yScale.ticks) {
      const y = fmt(yScale.pos(tick));
      parts.push(
        `<line x1="${PLOT.left}" y1="${y}" x2="${PLOT.right}" y2="${y}" ` +
          `stroke="#e0e0e0"/>`,
        `<text x="${PLOT.left - 8}" y="${y}" text-anchor="end" ` +
          `dominant-baseline="middle">${label(tick)}</text>`,
      );
    }
    for (const tick of xScale.ticks) {
      const x = fmt(xScale.pos(tick));
      parts.push(
        `<line x1="${x}" y1="${PLOT.bottom}" x2="${x}" ` +
          `y2="${PLOT.bottom + 5}" stroke="#333"/>`,
        `<text x="${x}" y="${PLOT.bottom + 20}" text-anchor="middle">` +
          `${label(tick)}</text>`,
      );
    }
    parts.push(
      `<line x1="${PLOT.left}" y1="${PLOT.bottom}" x2="${PLOT.right}" ` +
        `y2="${PLOT.bottom}" stroke="#333"/>`,
      `<line x1="${PLOT.left}" y1="${PLOT.top}" x2="${PLOT.left}" ` +
        `y2="${PLOT.bottom}" stroke="#333"/>`,
      `<text x="${(PLOT.left + PLOT.right) / 2}" y="${PLOT.bottom + 40}" ` +
        `text-anchor="middle">${esc(xName)}</text>`,
      `<text x="20" y="${(PLOT.top + PLOT.bottom) / 2}" ` +
        `text-anchor="middle" transform="rotate(-90 20 ${
          (PLOT.top + PLOT.bottom) / 2
        })">CCT (us)</text>`,
    );

    const subValues = [...new Set(drawn.map((s) => s.subValue))].sort(
      (a, b) => a - b,
    );
    let legendY = PLOT.top + 6;
    for (const s of drawn) {
      const color = FAMILY_COLORS[s.family] ?? "#e377c2";
      const dash = SUB_DASHES[subValues.indexOf(s.subValue) % SUB_DASHES.length];
      const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
      const coords = s.points
        .map((p) => `${fmt(xScale.pos(p.x))},${fmt(yScale.pos(p.y))}`)
        .join(" ");
      parts.push(
        `<polyline points="${coords}" fill="none" stroke="${color}" ` +
          `stroke-width="1.8"${dashAttr}/>`,
      );
      for (const p of s.points) {
        parts.push(
          `<circle cx="${fmt(xScale.pos(p.x))}" cy="${fmt(
            yScale.pos(p.y),
          )}" r="2.6" fill="${color}"/>`,
        );
      }
      parts.push(
        `<line x1="${LEGEND_X}" y1="${legendY}" x2="${LEGEND_X + 26}" ` +
          `y2="${legendY}" stroke="${color}" stroke-width="1.8"${dashAttr}/>`,
        `<text x="${LEGEND_X + 32}" y="${legendY}" ` +
          `dominant-baseline="middle">${esc(s.label)}</text>`,
      );
      legendY += 18;
    }
  }

  let noteY = PLOT.bottom + 62;
  for (const note of notes) {
    parts.push(
      `<text x="${PLOT.left}" y="${noteY}" fill="#666" font-size="11">` +
        `note: ${esc(note)}</text>`,
    );
    noteY += 16;
  }

  parts.push("</svg>");
  return { svg: parts.join("\n") + "\n", notes };
}
