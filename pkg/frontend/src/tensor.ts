/**
 * Minimal float64 tensor with reverse-mode autodiff.
 *
 * Every op builds a tape node with a hand-written backward closure;
 * `backward(loss)` topologically sorts the tape and accumulates
 * gradients into each tensor's `grad` buffer. Float64 throughout so
 * analytic gradients can be validated against central finite
 * differences at tight tolerances.
 */

export class Tensor {
  readonly shape: readonly number[];
  readonly data: Float64Array;
  grad: Float64Array | null = null;
  requiresGrad: boolean;
  /** @internal */
  parents: Tensor[] = [];
  /** @internal */
  backwardFn: (() => void) | null = null;

  constructor(shape: readonly number[], data?: Float64Array, requiresGrad = false) {
    this.shape = [...shape];
    const n = numel(shape);
    if (data !== undefined && data.length !== n) {
      throw new Error(`data length ${data.length} does not match shape [${shape}]`);
    }
    this.data = data ?? new Float64Array(n);
    this.requiresGrad = requiresGrad;
  }

  get size(): number {
    return this.data.length;
  }

  ensureGrad(): Float64Array {
    if (this.grad === null) this.grad = new Float64Array(this.size);
    return this.grad;
  }

  zeroGrad(): void {
    this.grad = null;
  }

  item(): number {
    if (this.size !== 1) throw new Error("item() requires a single-element tensor");
    return this.data[0];
  }
}

export function numel(shape: readonly number[]): number {
  return shape.reduce((a, b) => a * b, 1);
}

export function tensor(
  shape: readonly number[],
  values?: ArrayLike<number>,
  requiresGrad = false,
): Tensor {
  const data = values === undefined ? undefined : Float64Array.from(values as number[]);
  return new Tensor(shape, data, requiresGrad);
}

export function zerosLike(t: Tensor): Tensor {
  return new Tensor(t.shape);
}

function sameShape(a: Tensor, b: Tensor): boolean {
  return a.shape.length === b.shape.length && a.shape.every((d, i) => d === b.shape[i]);
}

function node(
  out: Tensor,
  parents: Tensor[],
  backwardFn: () => void,
): Tensor {
  if (parents.some((p) => p.requiresGrad)) {
    out.requiresGrad = true;
    out.parents = parents;
    out.backwardFn = backwardFn;
  }
  return out;
}

/** Run reverse-mode autodiff from a scalar loss. */
export function backward(loss: Tensor): void {
  if (loss.size !== 1) throw new Error("backward() requires a scalar loss");
  const order: Tensor[] = [];
  const seen = new Set<Tensor>();
  const visit = (t: Tensor) => {
    if (seen.has(t)) return;
    seen.add(t);
    for (const p of t.parents) visit(p);
    order.push(t);
  };
  visit(loss);
  loss.ensureGrad()[0] = 1.0;
  for (let i = order.length - 1; i >= 0; i--) {
    const t = order[i];
    if (t.backwardFn !== null && t.grad !== null) t.backwardFn();
  }
}

// --------------------------------------------------------------- elementwise

export function add(a: Tensor, b: Tensor): Tensor {
  if (!sameShape(a, b)) throw new Error(`add: shape mismatch [${a.shape}] vs [${b.shape}]`);
  const out = new Tensor(a.shape);
  for (let i = 0; i < out.size; i++) out.data[i] = a.data[i] + b.data[i];
  return node(out, [a, b], () => {
    const g = out.grad!;
    if (a.requiresGrad) {
      const ga = a.ensureGrad();
      for (let i = 0; i < g.length; i++) ga[i] += g[i];
    }
    if (b.requiresGrad) {
      const gb = b.ensureGrad();
      for (let i = 0; i < g.length; i++) gb[i] += g[i];
    }
  });
}

export function addScalar(a: Tensor, c: number): Tensor {
  const out = new Tensor(a.shape);
  for (let i = 0; i < out.size; i++) out.data[i] = a.data[i] + c;
  return node(out, [a], () => {
    const g = out.grad!;
    if (a.requiresGrad) {
      const ga = a.ensureGrad();
      for (let i = 0; i < g.length; i++) ga[i] += g[i];
    }
  });
}

export function relu(a: Tensor): Tensor {
  const out = new Tensor(a.shape);
  for (let i = 0; i < out.size; i++) out.data[i] = a.data[i] > 0 ? a.data[i] : 0;
  return node(out, [a], () => {
    const g = out.grad!;
    if (a.requiresGrad) {
      const ga = a.ensureGrad();
      for (let i = 0; i < g.length; i++) if (a.data[i] > 0) ga[i] += g[i];
    }
  });
}

export function tanhT(a: Tensor): Tensor {
  const out = new Tensor(a.shape);
  for (let i = 0; i < out.size; i++) out.data[i] = Math.tanh(a.data[i]);
  return node(out, [a], () => {
    const g = out.grad!;
    if (a.requiresGrad) {
      const ga = a.ensureGrad();
      for (let i = 0; i < g.length; i++) ga[i] += (1 - out.data[i] * out.data[i]) * g[i];
    }
  });
}

// -------------------------------------------------------------- spatial ops

function check4d(t: Tensor, what: string): [number, number, number, number] {
  if (t.shape.length !== 4) throw new Error(`${what}: expected a 4-d tensor, got [${t.shape}]`);
  return t.shape as unknown as [number, number, number, number];
}

/** Pointwise channel projection: x[B,Ci,H,W] x w[Co,Ci] (+ bias[Co]) -> [B,Co,H,W]. */
export function conv1x1(x: Tensor, w: Tensor, bias?: Tensor): Tensor {
  const [B, Ci, H, W] = check4d(x, "conv1x1");
  if (w.shape.length !== 2 || w.shape[1] !== Ci) {
    throw new Error(`conv1x1: weight [${w.shape}] incompatible with ${Ci} input channels`);
  }
  const Co = w.shape[0];
  if (bias !== undefined && (bias.shape.length !== 1 || bias.shape[0] !== Co)) {
    throw new Error(`conv1x1: bias [${bias.shape}] incompatible with ${Co} output channels`);
  }
  const HW = H * W;
  const out = new Tensor([B, Co, H, W]);
  for (let b = 0; b < B; b++) {
    for (let o = 0; o < Co; o++) {
      const base = (b * Co + o) * HW;
      const bv = bias === undefined ? 0 : bias.data[o];
      for (let p = 0; p < HW; p++) out.data[base + p] = bv;
      for (let i = 0; i < Ci; i++) {
        const wv = w.data[o * Ci + i];
        if (wv === 0) continue;
        const xb = (b * Ci + i) * HW;
        for (let p = 0; p < HW; p++) out.data[base + p] += wv * x.data[xb + p];
      }
    }
  }
  const parents = bias === undefined ? [x, w] : [x, w, bias];
  return node(out, parents, () => {
    const g = out.grad!;
    const gx = x.requiresGrad ? x.ensureGrad() : null;
    const gw = w.requiresGrad ? w.ensureGrad() : null;
    const gb = bias !== undefined && bias.requiresGrad ? bias.ensureGrad() : null;
    for (let b = 0; b < B; b++) {
      for (let o = 0; o < Co; o++) {
        const base = (b * Co + o) * HW;
        if (gb !== null) {
          for (let p = 0; p < HW; p++) gb[o] += g[base + p];
        }
        for (let i = 0; i < Ci; i++) {
          const xb = (b * Ci + i) * HW;
          const wv = w.data[o * Ci + i];
          if (gx !== null && wv !== 0) {
            for (let p = 0; p < HW; p++) gx[xb + p] += wv * g[base + p];
          }
          if (gw !== null) {
            let acc = 0;
            for (let p = 0; p < HW; p++) acc += g[base + p] * x.data[xb + p];
            gw[o * Ci + i] += acc;
          }
        }
      }
    }
  });
}

/** Average pooling by an integer factor: [B,C,H,W] -> [B,C,H/f,W/f]. */
export function avgPool(x: Tensor, factor: number): Tensor {
  const [B, C, H, W] = check4d(x, "avgPool");
  if (!Number.isInteger(factor) || factor < 1) throw new Error("avgPool: factor must be a positive integer");
  if (H % factor !== 0 || W % factor !== 0) {
    throw new Error(`avgPool: spatial dims ${H}x${W} not divisible by ${factor}`);
  }
  const Ho = H / factor;
  const Wo = W / factor;
  const inv = 1 / (factor * factor);
  const out = new Tensor([B, C, Ho, Wo]);
  for (let bc = 0; bc < B * C; bc++) {
    const xb = bc * H * W;
    const ob = bc * Ho * Wo;
    for (let ho = 0; ho < Ho; ho++) {
      for (let wo = 0; wo < Wo; wo++) {
        let acc = 0;
        for (let dh = 0; dh < factor; dh++) {
          const row = xb + (ho * factor + dh) * W + wo * factor;
          for (let dw = 0; dw < factor; dw++) acc += x.data[row + dw];
        }
        out.data[ob + ho * Wo + wo] = acc * inv;
      }
    }
  }
  return node(out, [x], () => {
    if (!x.requiresGrad) return;
    const g = out.grad!;
    const gx = x.ensureGrad();
    for (let bc = 0; bc < B * C; bc++) {
      const xb = bc * H * W;
      const ob = bc * Ho * Wo;
      for (let ho = 0; ho < Ho; ho++) {
        for (let wo = 0; wo < Wo; wo++) {
          const gv = g[ob + ho * Wo + wo] * inv;
          for (let dh = 0; dh < factor; dh++) {
            const row = xb + (ho * factor + dh) * W + wo * factor;
            for (let dw = 0; dw < factor; dw++) gx[row + dw] += gv;
          }
        }
      }
    }
  });
}

/** Global average pool: [B,C,H,W] -> [B,C]. */
export function gap(x: Tensor): Tensor {
  const [B, C, H, W] = check4d(x, "gap");
  const HW = H * W;
  const out = new Tensor([B, C]);
  for (let bc = 0; bc < B * C; bc++) {
    let acc = 0;
    const base = bc * HW;
    for (let p = 0; p < HW; p++) acc += x.data[base + p];
    out.data[bc] = acc / HW;
  }
  return node(out, [x], () => {
    if (!x.requiresGrad) return;
    const g = out.grad!;
    const gx = x.ensureGrad();
    for (let bc = 0; bc < B * C; bc++) {
      const gv = g[bc] / HW;
      const base = bc * HW;
      for (let p = 0; p < HW; p++) gx[base + p] += gv;
    }
  });
}

// ------------------------------------------------------------------- linear

/** x[B,I] x w[O,I] (+ bias[O]) -> [B,O]. */
export function linear(x: Tensor, w: Tensor, bias?: Tensor): Tensor {
  if (x.shape.length !== 2 || w.shape.length !== 2 || x.shape[1] !== w.shape[1]) {
    throw new Error(`linear: [${x.shape}] x [${w.shape}] incompatible`);
  }
  const [B, I] = x.shape;
  const O = w.shape[0];
  const out = new Tensor([B, O]);
  for (let b = 0; b < B; b++) {
    for (let o = 0; o < O; o++) {
      let acc = bias === undefined ? 0 : bias.data[o];
      for (let i = 0; i < I; i++) acc += w.data[o * I + i] * x.data[b * I + i];
      out.data[b * O + o] = acc;
    }
  }
  const parents = bias === undefined ? [x, w] : [x, w, bias];
  return node(out, parents, () => {
    const g = out.grad!;
    const gx = x.requiresGrad ? x.ensureGrad() : null;
    const gw = w.requiresGrad ? w.ensureGrad() : null;
    const gb = bias !== undefined && bias.requiresGrad ? bias.ensureGrad() : null;
    for (let b = 0; b < B; b++) {
      for (let o = 0; o < O; o++) {
        const gv = g[b * O + o];
        if (gv === 0) continue;
        if (gb !== null) gb[o] += gv;
        for (let i = 0; i < I; i++) {
          if (gx !== null) gx[b * I + i] += w.data[o * I + i] * gv;
          if (gw !== null) gw[o * I + i] += x.data[b * I + i] * gv;
        }
      }
    }
  });
}

// --------------------------------------------------- channel-statistic ops

/** Per-channel spatial l2 norm: [B,C,H,W] -> [B,C], sqrt(sum x^2 + eps). */
export function channelL2(x: Tensor, eps: number): Tensor {
  const [B, C, H, W] = check4d(x, "channelL2");
  const HW = H * W;
  const out = new Tensor([B, C]);
  for (let bc = 0; bc < B * C; bc++) {
    let acc = eps;
    const base = bc * HW;
    for (let p = 0; p < HW; p++) acc += x.data[base + p] * x.data[base + p];
    out.data[bc] = Math.sqrt(acc);
  }
  return node(out, [x], () => {
    if (!x.requiresGrad) return;
    const g = out.grad!;
    const gx = x.ensureGrad();
    for (let bc = 0; bc < B * C; bc++) {
      const scale = g[bc] / out.data[bc];
      const base = bc * HW;
      for (let p = 0; p < HW; p++) gx[base + p] += x.data[base + p] * scale;
    }
  });
}

/** Per-row root-mean-square over channels: [B,C] -> [B], sqrt(mean s^2 + eps). */
export function rmsRows(s: Tensor, eps: number): Tensor {
  if (s.shape.length !== 2) throw new Error("rmsRows: expected [B,C]");
  const [B, C] = s.shape;
  const out = new Tensor([B]);
  for (let b = 0; b < B; b++) {
    let acc = 0;
    for (let c = 0; c < C; c++) acc += s.data[b * C + c] * s.data[b * C + c];
    out.data[b] = Math.sqrt(acc / C + eps);
  }
  return node(out, [s], () => {
    if (!s.requiresGrad) return;
    const g = out.grad!;
    const gs = s.ensureGrad();
    for (let b = 0; b < B; b++) {
      const scale = g[b] / (C * out.data[b]);
      for (let c = 0; c < C; c++) gs[b * C + c] += s.data[b * C + c] * scale;
    }
  });
}

/** Row-broadcast division: s[B,C] / m[B] -> [B,C]. */
export function divRows(s: Tensor, m: Tensor): Tensor {
  if (s.shape.length !== 2 || m.shape.length !== 1 || s.shape[0] !== m.shape[0]) {
    throw new Error("divRows: expected s[B,C] and m[B]");
  }
  const [B, C] = s.shape;
  const out = new Tensor([B, C]);
  for (let b = 0; b < B; b++) {
    const inv = 1 / m.data[b];
    for (let c = 0; c < C; c++) out.data[b * C + c] = s.data[b * C + c] * inv;
  }
  return node(out, [s, m], () => {
    const g = out.grad!;
    const gs = s.requiresGrad ? s.ensureGrad() : null;
    const gm = m.requiresGrad ? m.ensureGrad() : null;
    for (let b = 0; b < B; b++) {
      const inv = 1 / m.data[b];
      for (let c = 0; c < C; c++) {
        const gv = g[b * C + c];
        if (gs !== null) gs[b * C + c] += gv * inv;
        if (gm !== null) gm[b] -= gv * s.data[b * C + c] * inv * inv;
      }
    }
  });
}

/** Per-channel affine on [B,C]: scale[C] * n + shift[C]. */
export function affineChannels(n: Tensor, scale: Tensor, shift: Tensor): Tensor {
  if (n.shape.length !== 2) throw new Error("affineChannels: expected [B,C]");
  const [B, C] = n.shape;
  if (scale.shape.length !== 1 || scale.shape[0] !== C || shift.shape.length !== 1 || shift.shape[0] !== C) {
    throw new Error("affineChannels: scale/shift must be [C]");
  }
  const out = new Tensor([B, C]);
  for (let b = 0; b < B; b++) {
    for (let c = 0; c < C; c++) {
      out.data[b * C + c] = scale.data[c] * n.data[b * C + c] + shift.data[c];
    }
  }
  return node(out, [n, scale, shift], () => {
    const g = out.grad!;
    const gn = n.requiresGrad ? n.ensureGrad() : null;
    const gsc = scale.requiresGrad ? scale.ensureGrad() : null;
    const gsh = shift.requiresGrad ? shift.ensureGrad() : null;
    for (let b = 0; b < B; b++) {
      for (let c = 0; c < C; c++) {
        const gv = g[b * C + c];
        if (gn !== null) gn[b * C + c] += scale.data[c] * gv;
        if (gsc !== null) gsc[c] += n.data[b * C + c] * gv;
        if (gsh !== null) gsh[c] += gv;
      }
    }
  });
}

/** Channel-wise gate: x[B,C,H,W] * g[B,C] -> [B,C,H,W]. */
export function scaleChannels(x: Tensor, gate: Tensor): Tensor {
  const [B, C, H, W] = check4d(x, "scaleChannels");
  if (gate.shape.length !== 2 || gate.shape[0] !== B || gate.shape[1] !== C) {
    throw new Error("scaleChannels: gate must be [B,C]");
  }
  const HW = H * W;
  const out = new Tensor(x.shape);
  for (let bc = 0; bc < B * C; bc++) {
    const gv = gate.data[bc];
    const base = bc * HW;
    for (let p = 0; p < HW; p++) out.data[base + p] = x.data[base + p] * gv;
  }
  return node(out, [x, gate], () => {
    const g = out.grad!;
    const gx = x.requiresGrad ? x.ensureGrad() : null;
    const gg = gate.requiresGrad ? gate.ensureGrad() : null;
    for (let bc = 0; bc < B * C; bc++) {
      const base = bc * HW;
      const gv = gate.data[bc];
      for (let p = 0; p < HW; p++) {
        if (gx !== null) gx[base + p] += gv * g[base + p];
        if (gg !== null) gg[bc] += x.data[base + p] * g[base + p];
      }
    }
  });
}

/** Row-wise l2 normalization of [B,D]. */
export function l2NormalizeRows(x: Tensor, eps = 1e-12): Tensor {
  if (x.shape.length !== 2) throw new Error("l2NormalizeRows: expected [B,D]");
  const [B, D] = x.shape;
  const norms = new Float64Array(B);
  const out = new Tensor(x.shape);
  for (let b = 0; b < B; b++) {
    let acc = eps;
    for (let d = 0; d < D; d++) acc += x.data[b * D + d] * x.data[b * D + d];
    norms[b] = Math.sqrt(acc);
    for (let d = 0; d < D; d++) out.data[b * D + d] = x.data[b * D + d] / norms[b];
  }
  return node(out, [x], () => {
    if (!x.requiresGrad) return;
    const g = out.grad!;
    const gx = x.ensureGrad();
    for (let b = 0; b < B; b++) {
      let dot = 0;
      for (let d = 0; d < D; d++) dot += g[b * D + d] * x.data[b * D + d];
      const n = norms[b];
      for (let d = 0; d < D; d++) {
        gx[b * D + d] += g[b * D + d] / n - (x.data[b * D + d] * dot) / (n * n * n);
      }
    }
  });
}
