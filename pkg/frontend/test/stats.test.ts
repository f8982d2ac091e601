import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { parseSweepCsv, type SweepRow } from "../dist/csv.js";
import { computeReductions, formatStats } from "../dist/stats.js";

const FIXTURE = fileURLToPath(new URL("fixtures/sweep.csv", import.meta.url));

function row(partial: Partial<SweepRow>): SweepRow {
  return {
    scenario: "s",
    algorithm: "rabenseifner",
    nodes: 8,
    ocs: 4,
    sizeMb: 40,
    mode: "strawman",
    cctUs: 1000,
    reconfigs: 0,
    status: "ok",
    wallS: 0,
    ...partial,
  };
}

describe("computeReductions", () => {
  it("applies the reduction formula", () => {
    const points = computeReductions([
      row({ mode: "strawman", cctUs: 1500 }),
      row({ mode: "oneshot", cctUs: 1000 }),
      row({ mode: "swot-heuristic", cctUs: 1200 }),
    ]);
    expect(points).toHaveLength(1);
    const pt = points[0]!;
    expect(pt.swotMode).toBe("swot-heuristic");
    expect(pt.vsStrawman).toBeCloseTo(100 * (1 - 1200 / 1500), 10);
    expect(pt.vsOneShot).toBeCloseTo(100 * (1 - 1200 / 1000), 10);
  });

  it("prefers swot-exact over the heuristic", () => {
    const points = computeReductions([
      row({ mode: "strawman", cctUs: 1500 }),
      row({ mode: "swot-heuristic", cctUs: 1300 }),
      row({ mode: "swot-exact", cctUs: 1200 }),
    ]);
    expect(points[0]!.swotMode).toBe("swot-exact");
    expect(points[0]!.swotCctUs).toBe(1200);
  });

  it("reports null against absent or infeasible baselines", () => {
    const points = computeReductions([
      row({ mode: "oneshot", cctUs: null, status: "infeasible: 7 > 4" }),
      row({ mode: "swot-heuristic", cctUs: 1200 }),
    ]);
    expect(points[0]!.vsOneShot).toBeNull();
    expect(points[0]!.vsStrawman).toBeNull();
  });

  it("skips points without any swot value", () => {
    const points = computeReductions([
      row({ mode: "strawman", cctUs: 1500 }),
      row({ mode: "oneshot", cctUs: 1000 }),
    ]);
    expect(points).toHaveLength(0);
  });

  it("orders points by algorithm, nodes, size", () => {
    const rows: SweepRow[] = [];
    for (const algorithm of ["pairwise", "bruck"]) {
      for (const nodes of [16, 8]) {
        for (const sizeMb of [40, 4]) {
          rows.push(row({ algorithm, nodes, sizeMb, mode: "swot-heuristic" }));
        }
      }
    }
    const points = computeReductions(rows);
    const keys = points.map((p) => `${p.algorithm}/${p.nodes}/${p.sizeMb}`);
    expect(keys).toEqual([
      "bruck/8/4",
      "bruck/8/40",
      "bruck/16/4",
      "bruck/16/40",
      "pairwise/8/4",
      "pairwise/8/40",
      "pairwise/16/4",
      "pairwise/16/40",
    ]);
  });

  it("covers every fixture point that has a swot row", () => {
    const rows = parseSweepCsv(readFileSync(FIXTURE, "utf8"));
    const points = computeReductions(rows);
    expect(points).toHaveLength(54); // 3 algorithms x 2 node counts x 9 sizes
  });
});

describe("formatStats", () => {
  it("writes one line per point with n/a for missing baselines", () => {
    const text = formatStats(
      computeReductions([
        row({ mode: "strawman", cctUs: 1500 }),
        row({ mode: "swot-heuristic", cctUs: 1200 }),
      ]),
    );
    expect(text).toContain("algorithm=rabenseifner");
    expect(text).toContain(
      "p8 size_mb=40: swot=1200.000us via swot-heuristic, " +
        "vs strawman 20.0%, vs one-shot n/a",
    );
  });

  it("is deterministic", () => {
    const rows = parseSweepCsv(readFileSync(FIXTURE, "utf8"));
    const a = formatStats(computeReductions(rows));
    const b = formatStats(computeReductions(rows));
    expect(a).toBe(b);
  });
});
