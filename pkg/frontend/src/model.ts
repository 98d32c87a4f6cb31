/**
 * Toy embedding backbone for 256x128 pedestrian crops.
 *
 * Four stages of pointwise channel mixing + relu + 2x average pooling
 * (spatial dims halve per stage), with the gated shallow/deep fusion
 * applied on top of stages 2, 3, and 4. A global average pool and a
 * linear head produce the final embedding, l2-normalized so cosine
 * affinity downstream is well-defined.
 */

import {
  Tensor,
  avgPool,
  conv1x1,
  gap,
  l2NormalizeRows,
  linear,
  relu,
  tensor,
} from "./tensor.js";
import { HaFuseParams, haFuse, initGct } from "./fusion.js";
import { Rng, normal, sfc32 } from "./rng.js";

export const CROP_HEIGHT = 256;
export const CROP_WIDTH = 128;
export const EMBED_DIM = 2048;

const STAGE_CHANNELS = [3, 8, 16, 32, 32];

export interface EmbedderModel {
  /** Pointwise stage weights, stage i maps STAGE_CHANNELS[i] -> [i+1]. */
  stages: Tensor[];
  /** Fusion of stage-2 output into stage-3, and of that into stage-4. */
  fusions: HaFuseParams[];
  /** Embedding head, [EMBED_DIM, STAGE_CHANNELS[4]]. */
  head: Tensor;
  /** Optional classification head for training, [numClasses, EMBED_DIM]. */
  classifier: Tensor | null;
}

function randomWeight(shape: number[], fanIn: number, rng: Rng, requiresGrad: boolean): Tensor {
  const n = shape.reduce((a, b) => a * b, 1);
  const scale = Math.sqrt(2 / fanIn);
  const data = new Float64Array(n);
  for (let i = 0; i < n; i++) data[i] = normal(rng) * scale;
  const t = tensor(shape, data, requiresGrad);
  return t;
}

function randomFuse(cs: number, cd: number, rng: Rng, requiresGrad: boolean): HaFuseParams {
  return {
    proj: randomWeight([cd, cs], cs, rng, requiresGrad),
    bias: tensor([cd], new Array(cd).fill(0), requiresGrad),
    gct: initGct(cd, requiresGrad),
  };
}

export function initModel(seed = 0, numClasses: number | null = null, requiresGrad = false): EmbedderModel {
  const rng = sfc32(seed);
  const stages: Tensor[] = [];
  for (let i = 0; i < STAGE_CHANNELS.length - 1; i++) {
    stages.push(randomWeight(
      [STAGE_CHANNELS[i + 1], STAGE_CHANNELS[i]], STAGE_CHANNELS[i], rng, requiresGrad,
    ));
  }
  const fusions = [
    randomFuse(STAGE_CHANNELS[2], STAGE_CHANNELS[3], rng, requiresGrad),
    randomFuse(STAGE_CHANNELS[3], STAGE_CHANNELS[4], rng, requiresGrad),
  ];
  const head = randomWeight(
    [EMBED_DIM, STAGE_CHANNELS[STAGE_CHANNELS.length - 1]],
    STAGE_CHANNELS[STAGE_CHANNELS.length - 1], rng, requiresGrad,
  );
  const classifier = numClasses === null
    ? null
    : randomWeight([numClasses, EMBED_DIM], EMBED_DIM, rng, requiresGrad);
  return { stages, fusions, head, classifier };
}

export function parameters(model: EmbedderModel): Tensor[] {
  const params = [...model.stages, model.head];
  for (const f of model.fusions) {
    params.push(f.proj, f.bias, f.gct.alpha, f.gct.gamma, f.gct.beta);
  }
  if (model.classifier !== null) params.push(model.classifier);
  return params;
}

/** Crops [B,3,256,128] -> l2-normalized embeddings [B,EMBED_DIM]. */
export function embed(model: EmbedderModel, crops: Tensor): Tensor {
  if (crops.shape.length !== 4 || crops.shape[1] !== 3 ||
      crops.shape[2] !== CROP_HEIGHT || crops.shape[3] !== CROP_WIDTH) {
    throw new Error(
      `embed: expected crops [B,3,${CROP_HEIGHT},${CROP_WIDTH}], got [${crops.shape}]`,
    );
  }
  const s1 = avgPool(relu(conv1x1(crops, model.stages[0])), 2);
  const s2 = avgPool(relu(conv1x1(s1, model.stages[1])), 2);
  const s3 = avgPool(relu(conv1x1(s2, model.stages[2])), 2);
  const s4 = avgPool(relu(conv1x1(s3, model.stages[3])), 2);
  const f3 = haFuse(s2, s3, model.fusions[0]);
  const f4 = haFuse(f3, s4, model.fusions[1]);
  return l2NormalizeRows(linear(gap(f4), model.head));
}

/** Class logits for training; requires an initialized classifier head. */
export function classify(model: EmbedderModel, embeddings: Tensor): Tensor {
  if (model.classifier === null) throw new Error("model has no classifier head");
  return linear(embeddings, model.classifier);
}

// ------------------------------------------------------------ serialization

interface SerializedTensor {
  shape: number[];
  data: number[];
}

interface SerializedModel {
  format: "crop-embedder-weights-v1";
  stages: SerializedTensor[];
  fusions: {
    proj: SerializedTensor;
    bias: SerializedTensor;
    alpha: SerializedTensor;
    gamma: SerializedTensor;
    beta: SerializedTensor;
  }[];
  head: SerializedTensor;
  classifier: SerializedTensor | null;
}

function pack(t: Tensor): SerializedTensor {
  return { shape: [...t.shape], data: Array.from(t.data) };
}

function unpack(s: SerializedTensor, requiresGrad: boolean): Tensor {
  return tensor(s.shape, s.data, requiresGrad);
}

export function serializeModel(model: EmbedderModel): string {
  const out: SerializedModel = {
    format: "crop-embedder-weights-v1",
    stages: model.stages.map(pack),
    fusions: model.fusions.map((f) => ({
      proj: pack(f.proj),
      bias: pack(f.bias),
      alpha: pack(f.gct.alpha),
      gamma: pack(f.gct.gamma),
      beta: pack(f.gct.beta),
    })),
    head: pack(model.head),
    classifier: model.classifier === null ? null : pack(model.classifier),
  };
  return JSON.stringify(out);
}

export function deserializeModel(text: string, requiresGrad = false): EmbedderModel {
  let raw: SerializedModel;
  try {
    raw = JSON.parse(text);
  } catch {
    throw new Error("weights file is not valid JSON");
  }
  if (raw.format !== "crop-embedder-weights-v1") {
    throw new Error("unrecognized weights format");
  }
  return {
    stages: raw.stages.map((s) => unpack(s, requiresGrad)),
    fusions: raw.fusions.map((f) => ({
      proj: unpack(f.proj, requiresGrad),
      bias: unpack(f.bias, requiresGrad),
      gct: {
        alpha: unpack(f.alpha, requiresGrad),
        gamma: unpack(f.gamma, requiresGrad),
        beta: unpack(f.beta, requiresGrad),
      },
    })),
    head: unpack(raw.head, requiresGrad),
    classifier: raw.classifier === null ? null : unpack(raw.classifier, requiresGrad),
  };
}
