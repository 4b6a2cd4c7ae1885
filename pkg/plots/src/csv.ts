import * as fs from "node:fs";
import { HistogramRow, RewardStepRow } from "./types";

export function parseCsv(text: string): string[][] {
  return text
    .split("\n")
    .map((line) => line.trim())
    .filter((line) => line.length > 0)
    .map((line) => line.split(",").map((c) => c.trim()));
}

function requireHeader(rows: string[][], expected: string[], path: string): string[][] {
  if (rows.length === 0 || rows[0].join(",") !== expected.join(",")) {
    throw new Error(`${path}: expected header ${expected.join(",")}`);
  }
  return rows.slice(1);
}

export function readHistogram(path: string): HistogramRow[] {
  const rows = requireHeader(parseCsv(fs.readFileSync(path, "utf-8")), ["distance", "count"], path);
  return rows.map(([d, c]) => ({ distance: Number(d), count: Number(c) }));
}

export function readRewardSteps(path: string): RewardStepRow[] {
  const rows = requireHeader(
    parseCsv(fs.readFileSync(path, "utf-8")),
    ["engine", "step", "cumulative"],
    path
  );
  return rows.map(([engine, step, cumulative]) => ({
    engine,
    step: Number(step),
    cumulative: Number(cumulative),
  }));
}
