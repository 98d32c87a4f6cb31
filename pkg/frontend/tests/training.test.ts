import { describe, expect, it } from "vitest";

import { CROP_HEIGHT, CROP_WIDTH, embed, initModel } from "../src/model.js";
import { Tensor, tensor } from "../src/tensor.js";
import { buildTriplets, trainStep } from "../src/train.js";
import { sfc32 } from "../src/rng.js";

/** Two synthetic identities: warm-toned vs cool-toned crops with noise. */
function identityCrop(identity: number, rng: () => number): Float64Array {
  const base = identity === 0 ? [0.8, 0.2, 0.1] : [0.1, 0.2, 0.8];
  const hw = CROP_HEIGHT * CROP_WIDTH;
  const data = new Float64Array(3 * hw);
  for (let c = 0; c < 3; c++) {
    for (let p = 0; p < hw; p++) {
      data[c * hw + p] = Math.min(1, Math.max(0, base[c] + (rng() - 0.5) * 0.3));
    }
  }
  return data;
}

function batchOf(ids: number[], rng: () => number): Tensor {
  const hw = 3 * CROP_HEIGHT * CROP_WIDTH;
  const data = new Float64Array(ids.length * hw);
  ids.forEach((id, i) => data.set(identityCrop(id, rng), i * hw));
  return tensor([ids.length, 3, CROP_HEIGHT, CROP_WIDTH], data);
}

function cosine(a: Float64Array, b: Float64Array): number {
  let dot = 0;
  for (let i = 0; i < a.length; i++) dot += a[i] * b[i];
  return dot; // embeddings are unit-norm
}

describe("triplet construction", () => {
  it("pairs each sample with the next same and different label", () => {
    const { a, p, n } = buildTriplets([0, 0, 1, 1]);
    expect(a).toEqual([0, 1, 2, 3]);
    expect(p).toEqual([1, 0, 3, 2]);
    expect(n).toEqual([2, 2, 0, 0]);
  });

  it("skips samples with no positive or no negative", () => {
    expect(buildTriplets([0, 0, 0]).a).toEqual([]);
    expect(buildTriplets([0]).a).toEqual([]);
  });
});

describe("toy identity training", () => {
  it("separates two synthetic identities after 50 steps", () => {
    const model = initModel(1, 2, true);
    const rng = sfc32(77);
    const labels = [0, 1, 0, 1];
    const cfg = { epsilon: 0.1, margin: 0.3, numClasses: 2, learningRate: 0.05 };
    let last = Infinity;
    for (let step = 0; step < 50; step++) {
      last = trainStep(model, batchOf(labels, rng), labels, cfg).total;
    }
    expect(Number.isFinite(last)).toBe(true);

    // held-out crops, two per identity
    const held = batchOf([0, 0, 1, 1], sfc32(991));
    const out = embed(model, held);
    const rows = [0, 1, 2, 3].map((r) => out.data.slice(r * out.shape[1], (r + 1) * out.shape[1]));
    const intra = Math.min(cosine(rows[0], rows[1]), cosine(rows[2], rows[3]));
    const inter = Math.max(
      cosine(rows[0], rows[2]), cosine(rows[0], rows[3]),
      cosine(rows[1], rows[2]), cosine(rows[1], rows[3]),
    );
    // intra-identity cosine distance below inter-identity distance
    expect(1 - intra).toBeLessThan(1 - inter);
  });
});
