#!/usr/bin/env node
/**
 * plots <kind> --in FILE --out IMG
 *
 * Renders one figure from a schema v1 CSV/JSONL experiment file and writes
 * both PNG and SVG (the --out path plus its .svg sibling).  Kinds:
 *
 *   bracket        quenched slowdown bracket (quenched.csv/jsonl)
 *   tail-envelope  weighted tail-sum decay (tail.csv; reads tail_fit.json
 *                  next to the input, or --fit FILE)
 *   h-ratio        h(t) against the M(t) menu (rates.csv)
 *   max-bands      extreme-value bands (rates.csv)
 */

import { existsSync, writeFileSync } from "fs";
import { dirname, join } from "path";
import { parseArgs } from "util";

import { renderPng } from "./png.js";
import {
  renderBracket,
  renderHRatio,
  renderMaxBands,
  renderTailEnvelope,
} from "./figures.js";
import {
  bracketRecords,
  rateRecords,
  readSchemaFile,
  readTailFit,
  SchemaError,
  TailFit,
  tailRecords,
} from "./schema.js";

const KINDS = ["bracket", "tail-envelope", "h-ratio", "max-bands"] as const;
type Kind = (typeof KINDS)[number];

export interface CliOptions {
  kind: Kind;
  input: string;
  output: string;
  fit?: string;
}

export function parseCli(argv: string[]): CliOptions {
  const { values, positionals } = parseArgs({
    args: argv,
    allowPositionals: true,
    options: {
      in: { type: "string" },
      out: { type: "string" },
      fit: { type: "string" },
    },
  });
  const kind = positionals[0];
  if (!kind || !(KINDS as readonly string[]).includes(kind)) {
    throw new Error(`usage: plots <${KINDS.join("|")}> --in FILE --out IMG`);
  }
  if (!values.in || !values.out) {
    throw new Error("both --in FILE and --out IMG are required");
  }
  return { kind: kind as Kind, input: values.in, output: values.out, fit: values.fit };
}

export function renderSvg(opts: CliOptions): string {
  const table = readSchemaFile(opts.input);
  switch (opts.kind) {
    case "bracket":
      return renderBracket(bracketRecords(table));
    case "tail-envelope": {
      let fit: TailFit | undefined;
      const fitPath = opts.fit ?? join(dirname(opts.input), "tail_fit.json");
      if (opts.fit || existsSync(fitPath)) fit = readTailFit(fitPath);
      return renderTailEnvelope(tailRecords(table), fit);
    }
    case "h-ratio":
      return renderHRatio(rateRecords(table));
    case "max-bands":
      return renderMaxBands(rateRecords(table));
  }
}

export async function run(argv: string[]): Promise<number> {
  let opts: CliOptions;
  try {
    opts = parseCli(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }
  try {
    const svg = renderSvg(opts);
    const pngPath = opts.output.endsWith(".png") ? opts.output : `${opts.output}.png`;
    const svgPath = pngPath.replace(/\.png$/, ".svg");
    writeFileSync(svgPath, svg);
    writeFileSync(pngPath, renderPng(svg));
    console.log(`wrote ${pngPath} and ${svgPath}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema mismatch: ${err.message}`);
      return 2;
    }
    console.error((err as Error).message);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  run(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
