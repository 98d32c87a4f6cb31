/**
 * Training losses: label-smoothed cross-entropy and squared-distance
 * triplet hinge. Both return scalar tensors wired into the autodiff
 * tape so they can drive gradient steps directly.
 */

import { Tensor } from "./tensor.js";

export interface LossConfig {
  /** Smoothing mass moved off the true class. */
  epsilon: number;
  /** Triplet hinge margin. */
  margin: number;
  numClasses: number;
}

export const DEFAULT_LOSS_CONFIG: LossConfig = { epsilon: 0.1, margin: 0.3, numClasses: 2 };

/**
 * Smoothed target distribution for one label: the true class keeps
 * 1 - epsilon*(N-1)/N, every other class receives epsilon/N. Sums to 1
 * for any N and epsilon.
 */
export function smoothedTargets(label: number, numClasses: number, epsilon: number): Float64Array {
  if (numClasses < 2) throw new Error("numClasses must be >= 2");
  if (epsilon < 0 || epsilon >= 1) throw new Error("epsilon must be in [0, 1)");
  if (!Number.isInteger(label) || label < 0 || label >= numClasses) {
    throw new Error(`label ${label} out of range for ${numClasses} classes`);
  }
  const q = new Float64Array(numClasses).fill(epsilon / numClasses);
  q[label] = 1 - (epsilon * (numClasses - 1)) / numClasses;
  return q;
}

/**
 * Mean cross-entropy of logits[B,N] against smoothed targets.
 */
export function crossEntropyLabelSmoothing(
  logits: Tensor,
  labels: number[],
  epsilon: number,
): Tensor {
  if (logits.shape.length !== 2) throw new Error("crossEntropyLabelSmoothing: expected [B,N]");
  const [B, N] = logits.shape;
  if (labels.length !== B) throw new Error("label count does not match batch size");
  const softmax = new Float64Array(B * N);
  const q = new Float64Array(B * N);
  let total = 0;
  for (let b = 0; b < B; b++) {
    const targets = smoothedTargets(labels[b], N, epsilon);
    let maxv = -Infinity;
    for (let i = 0; i < N; i++) maxv = Math.max(maxv, logits.data[b * N + i]);
    let denom = 0;
    for (let i = 0; i < N; i++) denom += Math.exp(logits.data[b * N + i] - maxv);
    const logDenom = Math.log(denom) + maxv;
    for (let i = 0; i < N; i++) {
      const logp = logits.data[b * N + i] - logDenom;
      softmax[b * N + i] = Math.exp(logp);
      q[b * N + i] = targets[i];
      total -= targets[i] * logp;
    }
  }
  const out = new Tensor([1], Float64Array.of(total / B));
  if (logits.requiresGrad) {
    out.requiresGrad = true;
    out.parents = [logits];
    out.backwardFn = () => {
      const g = out.grad![0] / B;
      const gl = logits.ensureGrad();
      for (let i = 0; i < B * N; i++) gl[i] += (softmax[i] - q[i]) * g;
    };
  }
  return out;
}

/**
 * Sum over aligned triplets of max(0, d2(a,p) - d2(a,n) + margin) with
 * squared euclidean distances.
 */
export function tripletLoss(
  anchors: Tensor,
  positives: Tensor,
  negatives: Tensor,
  margin: number,
): Tensor {
  for (const t of [anchors, positives, negatives]) {
    if (t.shape.length !== 2) throw new Error("tripletLoss: expected [B,D] embeddings");
  }
  const [B, D] = anchors.shape;
  if (
    positives.shape[0] !== B || negatives.shape[0] !== B ||
    positives.shape[1] !== D || negatives.shape[1] !== D
  ) {
    throw new Error("tripletLoss: mismatched triplet counts or dimensions");
  }
  const active = new Uint8Array(B);
  let total = 0;
  for (let b = 0; b < B; b++) {
    let dap = 0;
    let dan = 0;
    for (let d = 0; d < D; d++) {
      const vp = anchors.data[b * D + d] - positives.data[b * D + d];
      const vn = anchors.data[b * D + d] - negatives.data[b * D + d];
      dap += vp * vp;
      dan += vn * vn;
    }
    const v = dap - dan + margin;
    if (v > 0) {
      active[b] = 1;
      total += v;
    }
  }
  const out = new Tensor([1], Float64Array.of(total));
  if (anchors.requiresGrad || positives.requiresGrad || negatives.requiresGrad) {
    out.requiresGrad = true;
    out.parents = [anchors, positives, negatives];
    out.backwardFn = () => {
      const g = out.grad![0];
      const ga = anchors.requiresGrad ? anchors.ensureGrad() : null;
      const gp = positives.requiresGrad ? positives.ensureGrad() : null;
      const gn = negatives.requiresGrad ? negatives.ensureGrad() : null;
      for (let b = 0; b < B; b++) {
        if (!active[b]) continue;
        for (let d = 0; d < D; d++) {
          const a = anchors.data[b * D + d];
          const p = positives.data[b * D + d];
          const n = negatives.data[b * D + d];
          if (ga !== null) ga[b * D + d] += 2 * (n - p) * g;
          if (gp !== null) gp[b * D + d] += -2 * (a - p) * g;
          if (gn !== null) gn[b * D + d] += 2 * (a - n) * g;
        }
      }
    };
  }
  return out;
}
