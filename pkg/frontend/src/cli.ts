#!/usr/bin/env node
/**
 * ocsched-plots: render sweep CSVs into SVG charts and a stats text.
 *
 *   ocsched-plots --input sweep.csv --out-dir out [--x-axis size_mb|nodes] [--log-log]
 */

import { resolve } from "node:path";
import { fileURLToPath } from "node:url";
import { parseArgs } from "node:util";

import { CsvError } from "./csv.js";
import { X_AXES, type XAxis } from "./chart.js";
import { render } from "./render.js";

const USAGE =
  "usage: ocsched-plots --input <sweep.csv> --out-dir <dir> " +
  "[--x-axis size_mb|nodes] [--log-log]";

export function main(argv: string[]): number {
  let values;
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        input: { type: "string" },
        "out-dir": { type: "string" },
        "x-axis": { type: "string", default: "size_mb" },
        "log-log": { type: "boolean", default: false },
      },
    }));
  } catch (err) {
    console.error((err as Error).message);
    console.error(USAGE);
    return 1;
  }

  const input = values.input;
  const outDir = values["out-dir"];
  const xAxis = values["x-axis"] as string;
  if (!input || !outDir) {
    console.error(USAGE);
    return 1;
  }
  if (!(X_AXES as readonly string[]).includes(xAxis)) {
    console.error(
      `--x-axis: unknown axis ${JSON.stringify(xAxis)}, ` +
        `expected one of ${X_AXES.join(", ")}`,
    );
    return 1;
  }

  try {
    const result = render({
      input,
      outDir,
      xAxis: xAxis as XAxis,
      logLog: values["log-log"] ?? false,
    });
    for (const chart of result.charts) {
      console.log(`wrote ${chart.path}`);
    }
    console.log(`wrote ${result.statsPath}`);
    for (const note of result.notes) {
      console.log(`note: ${note}`);
    }
    return 0;
  } catch (err) {
    if (err instanceof CsvError) {
      console.error(err.message);
      return 1;
    }
    throw err;
  }
}

if (
  process.argv[1] &&
  fileURLToPath(import.meta.url) === resolve(process.argv[1])
) {
  process.exit(main(process.argv.slice(2)));
}
