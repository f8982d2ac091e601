import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { CsvError, parseSweepCsv, REQUIRED_COLUMNS } from "../dist/csv.js";

const FIXTURE = fileURLToPath(new URL("fixtures/sweep.csv", import.meta.url));
const HEADER = REQUIRED_COLUMNS.join(",");

const SAMPLE =
  HEADER +
  "\n" +
  "rabenseifner-p8-40MB,rabenseifner,8,2,40,strawman,1500.000000,8,ok,0.001\n" +
  'pairwise-p8-40MB,pairwise,8,2,40,oneshot,,,"infeasible: 7 configs > 2 OCSes",0.000\n';

describe("parseSweepCsv", () => {
  it("parses the generated fixture", () => {
    const rows = parseSweepCsv(readFileSync(FIXTURE, "utf8"));
    expect(rows).toHaveLength(216);
    const first = rows[0]!;
    expect(first.algorithm).toBe("rabenseifner");
    expect(first.nodes).toBe(8);
    expect(first.ocs).toBe(4);
    expect(first.sizeMb).toBeCloseTo(1.6, 12);
    expect(first.mode).toBe("oneshot");
    expect(first.cctUs).toBeCloseTo(80, 6);
    expect(first.status).toBe("ok");
  });

  it("maps unsolved rows to null cct", () => {
    const rows = parseSweepCsv(readFileSync(FIXTURE, "utf8"));
    const infeasible = rows.filter((r) => r.cctUs === null);
    expect(infeasible).toHaveLength(18); // pairwise one-shot, 2 p x 9 sizes
    for (const row of infeasible) {
      expect(row.algorithm).toBe("pairwise");
      expect(row.mode).toBe("oneshot");
      expect(row.reconfigs).toBeNull();
      expect(row.status).toMatch(/^infeasible: /);
    }
  });

  it("handles quoted fields", () => {
    const rows = parseSweepCsv(SAMPLE);
    expect(rows[1]!.status).toBe("infeasible: 7 configs > 2 OCSes");
  });

  it("names missing columns", () => {
    const text = SAMPLE.replace("cct_us,", "completion,");
    expect(() => parseSweepCsv(text)).toThrowError(CsvError);
    expect(() => parseSweepCsv(text)).toThrowError(/missing columns: cct_us/);
  });

  it("rejects an empty file", () => {
    expect(() => parseSweepCsv("")).toThrowError(CsvError);
  });

  it("rejects a header-only file", () => {
    expect(() => parseSweepCsv(HEADER + "\n")).toThrowError(/no data rows/);
  });

  it("names the offending cell on bad numbers", () => {
    const text = SAMPLE.replace("1500.000000", "fast");
    expect(() => parseSweepCsv(text)).toThrowError(/row 2.*cct_us.*fast/);
  });
});
