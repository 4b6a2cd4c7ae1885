import * as fs from "node:fs";
import { RecordsFile, SearchRecord } from "./types";

/** Parse a records JSONL file: optional meta line first, then records. */
export function parseRecords(text: string): RecordsFile {
  let meta: Record<string, unknown> = {};
  const records: SearchRecord[] = [];
  for (const [i, line] of text.split("\n").entries()) {
    const trimmed = line.trim();
    if (!trimmed) continue;
    let obj: any;
    try {
      obj = JSON.parse(trimmed);
    } catch (err) {
      throw new Error(`line ${i + 1}: invalid JSON: ${(err as Error).message}`);
    }
    if (obj.meta !== undefined && obj.weights === undefined) {
      meta = obj.meta;
      continue;
    }
    if (!Array.isArray(obj.weights) || typeof obj.verdict !== "string") {
      throw new Error(`line ${i + 1}: not a search record`);
    }
    records.push(obj as SearchRecord);
  }
  return { meta, records };
}

export function readRecords(path: string): RecordsFile {
  return parseRecords(fs.readFileSync(path, "utf-8"));
}
