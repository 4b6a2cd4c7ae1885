#!/usr/bin/env node
/**
 * plot --kind <projection_grid|cumulative_by_degree|distance_histogram|reward_vs_steps>
 *      --in <file[,file...]> --out <file.svg|file.png> [--style <style.json>]
 *
 * Reads only the public JSONL/CSV result contracts; never mutates inputs.
 */

import * as fs from "node:fs";
import { readHistogram, readRewardSteps } from "./csv";
import { readRecords } from "./jsonl";
import { renderPng } from "./png";
import { renderSvg } from "./svg";
import { Scene } from "./scene";
import { cumulativeByDegree, distanceHistogram, projectionGrid, rewardVsSteps } from "./plots";
import { Style, mergeStyle } from "./types";

const KINDS = ["projection_grid", "cumulative_by_degree", "distance_histogram", "reward_vs_steps"];

interface Args {
  kind: string;
  inputs: string[];
  out: string;
  style?: string;
}

function parseArgs(argv: string[]): Args {
  const args: Partial<Args> = { inputs: [] };
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) throw new Error(`missing value for ${a}`);
      return argv[i];
    };
    if (a === "--kind") args.kind = next();
    else if (a === "--in") args.inputs!.push(...next().split(","));
    else if (a === "--out") args.out = next();
    else if (a === "--style") args.style = next();
    else throw new Error(`unknown argument ${a}`);
  }
  if (!args.kind || !args.out || args.inputs!.length === 0) {
    throw new Error("required: --kind, --in, --out");
  }
  if (!KINDS.includes(args.kind)) {
    throw new Error(`unknown kind ${args.kind}; expected one of ${KINDS.join(", ")}`);
  }
  return args as Args;
}

function buildScene(args: Args, style: Style): Scene {
  switch (args.kind) {
    case "projection_grid": {
      const records = args.inputs.flatMap((p) => readRecords(p).records);
      return projectionGrid(records, style);
    }
    case "cumulative_by_degree": {
      const records = args.inputs.flatMap((p) => readRecords(p).records);
      return cumulativeByDegree(records, style);
    }
    case "distance_histogram": {
      const rows = args.inputs.flatMap((p) => readHistogram(p));
      return distanceHistogram(rows, style);
    }
    case "reward_vs_steps": {
      const rows = args.inputs.flatMap((p) => readRewardSteps(p));
      return rewardVsSteps(rows, style);
    }
    default:
      throw new Error(`unknown kind ${args.kind}`);
  }
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
    const style = mergeStyle(
      args.style ? (JSON.parse(fs.readFileSync(args.style, "utf-8")) as Partial<Style>) : undefined
    );
    const scene = buildScene(args, style);
    if (args.out.endsWith(".png")) {
      fs.writeFileSync(args.out, renderPng(scene));
    } else {
      fs.writeFileSync(args.out, renderSvg(scene), "utf-8");
    }
    return 0;
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
