/**
 * Toy training loop: joint label-smoothed cross-entropy + triplet loss
 * over labeled crops, plain SGD. Scaled for small synthetic identity
 * sets; the loop itself has no size assumptions.
 */

import { Tensor, add, backward } from "./tensor.js";
import { EmbedderModel, classify, embed, parameters } from "./model.js";
import { LossConfig, crossEntropyLabelSmoothing, tripletLoss } from "./losses.js";

export interface TrainConfig extends LossConfig {
  learningRate: number;
}

function gatherRows(src: Tensor, rows: number[]): Tensor {
  const D = src.shape[1];
  const out = new Tensor([rows.length, D]);
  for (let r = 0; r < rows.length; r++) {
    out.data.set(src.data.subarray(rows[r] * D, (rows[r] + 1) * D), r * D);
  }
  out.requiresGrad = src.requiresGrad;
  if (out.requiresGrad) {
    out.parents = [src];
    out.backwardFn = () => {
      const g = out.grad!;
      const gs = src.ensureGrad();
      for (let r = 0; r < rows.length; r++) {
        for (let d = 0; d < D; d++) gs[rows[r] * D + d] += g[r * D + d];
      }
    };
  }
  return out;
}

/** Deterministic triplets: each sample anchors with the next same-label
 * sample as positive and the next different-label sample as negative. */
export function buildTriplets(labels: number[]): { a: number[]; p: number[]; n: number[] } {
  const a: number[] = [];
  const p: number[] = [];
  const n: number[] = [];
  const count = labels.length;
  for (let i = 0; i < count; i++) {
    let pos = -1;
    let neg = -1;
    for (let step = 1; step < count; step++) {
      const j = (i + step) % count;
      if (pos < 0 && labels[j] === labels[i]) pos = j;
      if (neg < 0 && labels[j] !== labels[i]) neg = j;
    }
    if (pos >= 0 && neg >= 0) {
      a.push(i);
      p.push(pos);
      n.push(neg);
    }
  }
  return { a, p, n };
}

export interface StepResult {
  total: number;
  ce: number;
  triplet: number;
}

/** One SGD step on a labeled crop batch; returns the loss components. */
export function trainStep(
  model: EmbedderModel,
  crops: Tensor,
  labels: number[],
  cfg: TrainConfig,
): StepResult {
  for (const p of parameters(model)) p.zeroGrad();
  const embeddings = embed(model, crops);
  const ce = crossEntropyLabelSmoothing(classify(model, embeddings), labels, cfg.epsilon);
  const { a, p, n } = buildTriplets(labels);
  const tri = tripletLoss(
    gatherRows(embeddings, a),
    gatherRows(embeddings, p),
    gatherRows(embeddings, n),
    cfg.margin,
  );
  const ceVal = ce.item();
  const triVal = tri.item();
  backward(add(ce, tri));
  for (const param of parameters(model)) {
    if (param.grad === null) continue;
    for (let i = 0; i < param.size; i++) param.data[i] -= cfg.learningRate * param.grad[i];
  }
  return { total: ceVal + triVal, ce: ceVal, triplet: triVal };
}
