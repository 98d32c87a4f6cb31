/** Binary PPM (P6) image reader/writer for pedestrian crops. */

import { readFileSync, writeFileSync } from "node:fs";

export interface Image {
  width: number;
  height: number;
  /** Channel-major [3, height, width] values in [0, 1]. */
  data: Float64Array;
}

export function decodePpm(buf: Buffer): Image {
  if (buf.length < 2 || buf.toString("latin1", 0, 2) !== "P6") {
    throw new Error("not a P6 PPM image");
  }
  let pos = 2;
  const tokens: number[] = [];
  while (tokens.length < 3) {
    if (pos >= buf.length) throw new Error("truncated PPM header");
    const ch = buf[pos];
    if (ch === 0x23) { // comment line
      while (pos < buf.length && buf[pos] !== 0x0a) pos++;
      pos++;
      continue;
    }
    if (ch === 0x20 || ch === 0x09 || ch === 0x0a || ch === 0x0d) {
      pos++;
      continue;
    }
    let start = pos;
    while (pos < buf.length && buf[pos] >= 0x30 && buf[pos] <= 0x39) pos++;
    if (pos === start) throw new Error("malformed PPM header");
    tokens.push(parseInt(buf.toString("latin1", start, pos), 10));
  }
  const [width, height, maxval] = tokens;
  if (maxval !== 255) throw new Error(`unsupported PPM maxval ${maxval}`);
  pos++; // single whitespace byte after maxval
  const expected = width * height * 3;
  if (buf.length - pos < expected) throw new Error("truncated PPM pixel data");
  const data = new Float64Array(expected);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const src = pos + (y * width + x) * 3;
      for (let c = 0; c < 3; c++) {
        data[c * height * width + y * width + x] = buf[src + c] / 255;
      }
    }
  }
  return { width, height, data };
}

export function readPpm(path: string): Image {
  return decodePpm(readFileSync(path));
}

export function encodePpm(image: Image): Buffer {
  const { width, height, data } = image;
  const header = Buffer.from(`P6\n${width} ${height}\n255\n`, "latin1");
  const pixels = Buffer.alloc(width * height * 3);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const dst = (y * width + x) * 3;
      for (let c = 0; c < 3; c++) {
        const v = data[c * height * width + y * width + x];
        pixels[dst + c] = Math.max(0, Math.min(255, Math.round(v * 255)));
      }
    }
  }
  return Buffer.concat([header, pixels]);
}

export function writePpm(path: string, image: Image): void {
  writeFileSync(path, encodePpm(image));
}
