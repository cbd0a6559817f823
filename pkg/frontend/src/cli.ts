#!/usr/bin/env node
/**
 * Command-line front end: regenerate figure SVGs from run artifacts.
 *
 * Usage:
 *   qflows-render render --preset <fig-name> --in <dir> --out <dir>
 *   qflows-render render --spec <file.json>
 *
 * The leading "render" token is optional when invoked through the
 * qflows-render binary. Exits 0 on success, 1 on any usage, schema, or
 * file error (nothing is written in that case).
 */

import { pathToFileURL } from "node:url";

import { figurePreset, loadFigureSpec, presetNames } from "./figures.js";
import { writeFigure } from "./render.js";
import { SchemaError } from "./schema.js";

const USAGE =
  "usage: qflows-render render --preset <fig-name> --in <dir> --out <dir>\n" +
  "       qflows-render render --spec <file.json>\n" +
  `presets: ${presetNames().join(", ")}`;

interface Args {
  preset?: string;
  specPath?: string;
  inDir?: string;
  outDir?: string;
}

function parseArgs(argv: readonly string[]): Args {
  const args: Args = {};
  let i = 0;
  if (argv[0] === "render") {
    i = 1;
  }
  for (; i < argv.length; i += 1) {
    const flag = argv[i]!;
    const value = argv[i + 1];
    if (value === undefined) {
      throw new SchemaError(`missing value for ${flag}`);
    }
    switch (flag) {
      case "--preset":
        args.preset = value;
        break;
      case "--spec":
        args.specPath = value;
        break;
      case "--in":
        args.inDir = value;
        break;
      case "--out":
        args.outDir = value;
        break;
      default:
        throw new SchemaError(`unknown argument ${flag}`);
    }
    i += 1;
  }
  return args;
}

export function main(argv: readonly string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (error) {
    console.error((error as Error).message);
    console.error(USAGE);
    return 1;
  }
  const bySpec = args.specPath !== undefined;
  const byPreset = args.preset !== undefined;
  if (bySpec === byPreset) {
    console.error("render requires exactly one of --spec or --preset");
    console.error(USAGE);
    return 1;
  }
  try {
    const spec = bySpec
      ? loadFigureSpec(args.specPath!)
      : buildPresetSpec(args);
    const result = writeFigure(spec);
    console.log(`wrote ${result.outPath}`);
    return 0;
  } catch (error) {
    if (error instanceof SchemaError) {
      console.error(error.message);
      return 1;
    }
    throw error;
  }
}

function buildPresetSpec(args: Args) {
  if (args.inDir === undefined || args.outDir === undefined) {
    throw new SchemaError("--preset requires --in <dir> and --out <dir>");
  }
  return figurePreset(args.preset!, args.inDir, args.outDir);
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
