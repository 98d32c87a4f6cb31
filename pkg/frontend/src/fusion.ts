/**
 * Gated channel attention and shallow/deep feature fusion.
 *
 * `gct` models per-channel relevance: each channel's spatial l2 norm is
 * scaled by a learned embedding weight, normalized against the
 * root-mean-square across channels, passed through a learned tanh gate,
 * and applied multiplicatively (gate = 1 + tanh(gamma * n + beta), so a
 * zero-initialized gate is the identity).
 *
 * `haFuse` merges a shallow (earlier, higher-resolution) feature map
 * into a deep one: 1x1 channel projection, average-pool downsampling to
 * the deep resolution, elementwise sum, then gating.
 */

import {
  Tensor,
  add,
  addScalar,
  affineChannels,
  avgPool,
  channelL2,
  conv1x1,
  divRows,
  rmsRows,
  scaleChannels,
  tanhT,
  tensor,
} from "./tensor.js";

export interface GctParams {
  /** Per-channel embedding weight on the norm, shape [C]. */
  alpha: Tensor;
  /** Per-channel gate scale, shape [C]. */
  gamma: Tensor;
  /** Per-channel gate shift, shape [C]. */
  beta: Tensor;
}

export function initGct(channels: number, requiresGrad = true): GctParams {
  return {
    alpha: tensor([channels], new Array(channels).fill(1), requiresGrad),
    gamma: tensor([channels], new Array(channels).fill(0), requiresGrad),
    beta: tensor([channels], new Array(channels).fill(0), requiresGrad),
  };
}

export function gct(x: Tensor, params: GctParams, eps = 1e-4): Tensor {
  const C = x.shape[1];
  if (params.alpha.shape[0] !== C) {
    throw new Error(`gct: parameters sized for ${params.alpha.shape[0]} channels, input has ${C}`);
  }
  const zeroShift = tensor([C]);
  const s = affineChannels(channelL2(x, eps), params.alpha, zeroShift);
  const n = divRows(s, rmsRows(s, eps));
  const gate = addScalar(tanhT(affineChannels(n, params.gamma, params.beta)), 1.0);
  return scaleChannels(x, gate);
}

export interface HaFuseParams {
  /** 1x1 projection from shallow to deep channel count, shape [Cd,Cs]. */
  proj: Tensor;
  /** Projection bias, shape [Cd]. */
  bias: Tensor;
  gct: GctParams;
}

export function initHaFuse(
  shallowChannels: number,
  deepChannels: number,
  scale = 0.1,
  requiresGrad = true,
): HaFuseParams {
  // deterministic non-random default: identity-ish striped projection
  const w = new Float64Array(deepChannels * shallowChannels);
  for (let o = 0; o < deepChannels; o++) w[o * shallowChannels + (o % shallowChannels)] = scale;
  return {
    proj: tensor([deepChannels, shallowChannels], w, requiresGrad),
    bias: tensor([deepChannels], new Array(deepChannels).fill(0), requiresGrad),
    gct: initGct(deepChannels, requiresGrad),
  };
}

/**
 * Fuse a shallow feature map into a deep one; output has deep's shape.
 *
 * The shallow map's spatial dims must be an identical integer multiple
 * of the deep map's in both axes.
 */
export function haFuse(shallow: Tensor, deep: Tensor, params: HaFuseParams): Tensor {
  if (shallow.shape.length !== 4 || deep.shape.length !== 4) {
    throw new Error("haFuse: expected 4-d feature maps");
  }
  if (shallow.shape[0] !== deep.shape[0]) {
    throw new Error(
      `haFuse: batch mismatch (shallow ${shallow.shape[0]}, deep ${deep.shape[0]})`,
    );
  }
  const [, , Hs, Ws] = shallow.shape;
  const [, , Hd, Wd] = deep.shape;
  if (Hs % Hd !== 0 || Ws % Wd !== 0 || Hs / Hd !== Ws / Wd) {
    throw new Error(
      `haFuse: shallow ${Hs}x${Ws} is not an integer multiple of deep ${Hd}x${Wd}`,
    );
  }
  const factor = Hs / Hd;
  const projected = conv1x1(shallow, params.proj, params.bias);
  const resized = factor === 1 ? projected : avgPool(projected, factor);
  return gct(add(resized, deep), params.gct);
}
