/**
 * Export pipeline: read crops listed in a manifest, run the embedding
 * model in deterministic evaluation mode, and write the binary sidecar
 * (one float32 vector per detection, keyed by frame and index).
 */

import { Tensor, tensor } from "./tensor.js";
import { CROP_HEIGHT, CROP_WIDTH, EMBED_DIM, EmbedderModel, embed } from "./model.js";
import { ManifestEntry } from "./manifest.js";
import { Image, readPpm } from "./ppm.js";
import { SidecarRecord, writeSidecar } from "./sidecar.js";

export function cropToTensor(image: Image): Tensor {
  if (image.height !== CROP_HEIGHT || image.width !== CROP_WIDTH) {
    throw new Error(
      `crop must be ${CROP_WIDTH}x${CROP_HEIGHT}, got ${image.width}x${image.height}`,
    );
  }
  return tensor([1, 3, CROP_HEIGHT, CROP_WIDTH], image.data);
}

export function embedImage(model: EmbedderModel, image: Image): Float32Array {
  const out = embed(model, cropToTensor(image));
  return Float32Array.from(out.data);
}

export function exportEmbeddings(
  model: EmbedderModel,
  entries: ManifestEntry[],
  outPath: string,
): number {
  const records: SidecarRecord[] = entries.map((entry) => ({
    frame: entry.frame,
    index: entry.index,
    vector: embedImage(model, readPpm(entry.cropPath)),
  }));
  writeSidecar(outPath, EMBED_DIM, records);
  return records.length;
}
