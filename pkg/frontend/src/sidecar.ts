/**
 * Binary embedding sidecar: magic "RTEMB1", uint32-le dimension, then
 * records of uint32-le frame, uint32-le detection index, and dim
 * float32-le components, sorted by (frame, index).
 */

import { readFileSync, writeFileSync } from "node:fs";

export const SIDECAR_MAGIC = "RTEMB1";

export interface SidecarRecord {
  frame: number;
  index: number;
  vector: Float32Array;
}

export function encodeSidecar(dim: number, records: SidecarRecord[]): Buffer {
  if (!Number.isInteger(dim) || dim <= 0) throw new Error("sidecar dimension must be positive");
  const sorted = [...records].sort((a, b) => a.frame - b.frame || a.index - b.index);
  const recSize = 8 + 4 * dim;
  const buf = Buffer.alloc(SIDECAR_MAGIC.length + 4 + recSize * sorted.length);
  buf.write(SIDECAR_MAGIC, 0, "latin1");
  buf.writeUInt32LE(dim, SIDECAR_MAGIC.length);
  let off = SIDECAR_MAGIC.length + 4;
  for (const rec of sorted) {
    if (rec.vector.length !== dim) {
      throw new Error(
        `embedding for frame ${rec.frame} index ${rec.index} has dimension ` +
        `${rec.vector.length}, expected ${dim}`,
      );
    }
    buf.writeUInt32LE(rec.frame, off);
    buf.writeUInt32LE(rec.index, off + 4);
    for (let i = 0; i < dim; i++) buf.writeFloatLE(rec.vector[i], off + 8 + 4 * i);
    off += recSize;
  }
  return buf;
}

export function writeSidecar(path: string, dim: number, records: SidecarRecord[]): void {
  writeFileSync(path, encodeSidecar(dim, records));
}

export function readSidecar(path: string): { dim: number; records: SidecarRecord[] } {
  const buf = readFileSync(path);
  if (buf.length < SIDECAR_MAGIC.length + 4 ||
      buf.toString("latin1", 0, SIDECAR_MAGIC.length) !== SIDECAR_MAGIC) {
    throw new Error("not an embedding sidecar");
  }
  const dim = buf.readUInt32LE(SIDECAR_MAGIC.length);
  if (dim <= 0) throw new Error("corrupt sidecar");
  const body = buf.subarray(SIDECAR_MAGIC.length + 4);
  const recSize = 8 + 4 * dim;
  if (body.length % recSize !== 0) throw new Error("corrupt sidecar");
  const records: SidecarRecord[] = [];
  for (let off = 0; off < body.length; off += recSize) {
    const frame = body.readUInt32LE(off);
    const index = body.readUInt32LE(off + 4);
    const vector = new Float32Array(dim);
    for (let i = 0; i < dim; i++) vector[i] = body.readFloatLE(off + 8 + 4 * i);
    records.push({ frame, index, vector });
  }
  return { dim, records };
}
