#!/usr/bin/env node
/**
 * plot --kind {data|lambda|theory|eps|delta|size} --in <csv...> --out <img>
 *
 * Renders one figure per invocation from dpsc aggregate CSVs (or, for
 * --kind data, from the dataset CSV with donor rows plus a target row).
 * Exit codes: 0 success, 2 usage/schema error, 3 I/O error.
 */

import * as fs from "fs";
import { buildChart, EmptySelectionError, FigureKind } from "./charts";
import { AggregateRow, DatasetSeries, parseAggregateCsv, parseDatasetCsv, SchemaError } from "./csv";
import { renderSvg } from "./render";

const KINDS: FigureKind[] = ["data", "lambda", "theory", "eps", "delta", "size"];

interface Args {
  kind: FigureKind;
  inputs: string[];
  out: string;
  width: number;
  height: number;
}

class UsageError extends Error {}

function parseArgs(argv: string[]): Args {
  let kind: string | undefined;
  let out: string | undefined;
  const inputs: string[] = [];
  let width = 900;
  let height = 560;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      if (i + 1 >= argv.length) throw new UsageError(`${arg} needs a value`);
      return argv[++i];
    };
    switch (arg) {
      case "--kind":
        kind = next();
        break;
      case "--in":
        inputs.push(next());
        break;
      case "--out":
        out = next();
        break;
      case "--width":
        width = Number(next());
        break;
      case "--height":
        height = Number(next());
        break;
      case "--help":
      case "-h":
        throw new UsageError("");
      default:
        throw new UsageError(`unknown argument: ${arg}`);
    }
  }
  if (!kind || !KINDS.includes(kind as FigureKind)) {
    throw new UsageError(`--kind must be one of ${KINDS.join("|")}`);
  }
  if (inputs.length === 0) throw new UsageError("at least one --in CSV is required");
  if (!out) throw new UsageError("--out is required");
  if (!Number.isFinite(width) || !Number.isFinite(height) || width <= 0 || height <= 0) {
    throw new UsageError("--width/--height must be positive numbers");
  }
  return { kind: kind as FigureKind, inputs, out, width, height };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    const message = (err as Error).message;
    if (message) console.error(`plot: ${message}`);
    console.error(
      "usage: plot --kind {data|lambda|theory|eps|delta|size} --in <csv...> --out <img>",
    );
    return 2;
  }

  let texts: string[];
  try {
    texts = args.inputs.map((path) => fs.readFileSync(path, "utf-8"));
  } catch (err) {
    console.error(`plot: ${(err as Error).message}`);
    return 3;
  }

  try {
    const aggregates: AggregateRow[] = [];
    const dataset: DatasetSeries[] = [];
    for (const text of texts) {
      if (args.kind === "data") {
        dataset.push(...parseDatasetCsv(text));
      } else {
        aggregates.push(...parseAggregateCsv(text, args.kind === "theory"));
      }
    }
    const built = buildChart(args.kind, aggregates, dataset);
    const svg = renderSvg(built.option, { width: args.width, height: args.height });
    fs.writeFileSync(args.out, svg, "utf-8");
    console.log(`wrote ${args.out} (${built.seriesNames.length} series)`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof EmptySelectionError) {
      console.error(`plot: ${err.message}`);
      return 2;
    }
    if ((err as NodeJS.ErrnoException).code) {
      console.error(`plot: ${(err as Error).message}`);
      return 3;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
