/**
 * Crop manifest: a CSV listing one detection crop per line as
 * `frame,index,path,confidence`. Paths are resolved relative to the
 * manifest file. A header line is allowed and skipped.
 */

import { readFileSync } from "node:fs";
import { dirname, isAbsolute, resolve } from "node:path";

export interface ManifestEntry {
  frame: number;
  index: number;
  cropPath: string;
  conf: number;
}

export function parseManifest(text: string, baseDir: string): ManifestEntry[] {
  const entries: ManifestEntry[] = [];
  const lines = text.split(/\r?\n/);
  for (let lineno = 1; lineno <= lines.length; lineno++) {
    const line = lines[lineno - 1].trim();
    if (line === "" || line.startsWith("#")) continue;
    const fields = line.split(",").map((f) => f.trim());
    if (lineno === 1 && fields[0].toLowerCase() === "frame") continue;
    if (fields.length !== 4) {
      throw new Error(`manifest line ${lineno}: expected frame,index,path,confidence`);
    }
    const frame = Number(fields[0]);
    const index = Number(fields[1]);
    const conf = Number(fields[3]);
    if (!Number.isInteger(frame) || frame < 1) {
      throw new Error(`manifest line ${lineno}: frame must be a positive integer`);
    }
    if (!Number.isInteger(index) || index < 0) {
      throw new Error(`manifest line ${lineno}: index must be a non-negative integer`);
    }
    if (!Number.isFinite(conf) || conf < 0 || conf > 1) {
      throw new Error(`manifest line ${lineno}: confidence must be in [0, 1]`);
    }
    const cropPath = isAbsolute(fields[2]) ? fields[2] : resolve(baseDir, fields[2]);
    entries.push({ frame, index, cropPath, conf });
  }
  return entries;
}

export function readManifest(path: string): ManifestEntry[] {
  return parseManifest(readFileSync(path, "utf8"), dirname(resolve(path)));
}
