/**
 * Reference forward pass of the mask network, written with explicit loops.
 *
 * Conventions (must stay in lockstep with the consumer's documentation):
 *  - feature channel 2k is Re of mic k, channel 2k+1 is Im
 *  - every spatial layer: per-frequency matrix multiply then parametric ReLU
 *  - last spatial layer emits one extra channel feeding the temporal block
 *  - GRU gates packed reset | update | candidate, one combined bias;
 *    candidate = tanh(ihN + biasN + reset * hhN)
 *  - layer output: concatenated split outputs, feature k routed to
 *    (k mod R) * (H/R) + floor(k / R)
 *  - real decoder output scales each complex spatial channel
 */

import { Prng } from "./prng";
import { Tensor, TensorMap, tensor } from "./npw1";

export interface Hyper {
  mics: number;
  bins: number;
  hidden: number;
  splits: number;
  spatialLayers: number;
  temporalLayers: number;
}

export const PAPER_HYPER: Hyper = {
  mics: 5,
  bins: 129,
  hidden: 96,
  splits: 2,
  spatialLayers: 4,
  temporalLayers: 3,
};

export function spatialChannels(h: Hyper, layer: number): [number, number] {
  const c = 2 * h.mics;
  return [c, layer === h.spatialLayers - 1 ? c + 1 : c];
}

/** Every tensor name/shape the weight container must carry. */
export function requiredShapes(h: Hyper): Map<string, number[]> {
  const hs = h.hidden / h.splits;
  const shapes = new Map<string, number[]>();
  shapes.set("hyperparams", [6]);
  for (let l = 0; l < h.spatialLayers; l++) {
    const [cin, cout] = spatialChannels(h, l);
    shapes.set(`spatial.${l}.weight`, [h.bins, cout, cin]);
    shapes.set(`spatial.${l}.prelu`, [cout]);
  }
  shapes.set("encoder.weight", [h.hidden, h.bins]);
  shapes.set("encoder.bias", [h.hidden]);
  for (let l = 0; l < h.temporalLayers; l++) {
    for (let r = 0; r < h.splits; r++) {
      shapes.set(`gru.${l}.split${r}.w_ih`, [3 * hs, hs]);
      shapes.set(`gru.${l}.split${r}.w_hh`, [3 * hs, hs]);
      shapes.set(`gru.${l}.split${r}.bias`, [3 * hs]);
    }
  }
  shapes.set("decoder.weight", [h.bins, h.hidden]);
  shapes.set("decoder.bias", [h.bins]);
  for (const name of ["p_a", "p_b", "beta0", "alpha0_ss", "alpha0_nn"]) {
    shapes.set(`controls.${name}`, [h.bins]);
  }
  return shapes;
}

export interface ControlPreset {
  pA: number;
  pB: number;
  beta0: number;
  alpha0Ss: number;
  alpha0Nn: number;
}

/**
 * Seeded random weights: every value uniform in [-scale, scale], drawn in
 * sorted-name order so the container is a pure function of (seed, hyper).
 */
export function generateWeights(
  seed: number,
  h: Hyper,
  preset?: ControlPreset,
  scale = 0.1
): TensorMap {
  if (h.hidden % h.splits !== 0) {
    throw new Error(`hidden ${h.hidden} not divisible by splits ${h.splits}`);
  }
  for (const v of Object.values(h)) {
    if (v < 1) throw new Error("hyperparameters must be >= 1");
  }
  const rng = new Prng(seed);
  const tensors: TensorMap = new Map();
  const shapes = requiredShapes(h);
  for (const name of [...shapes.keys()].sort()) {
    const dims = shapes.get(name)!;
    if (name === "hyperparams") {
      tensors.set(
        name,
        tensor(dims, [h.mics, h.bins, h.hidden, h.splits, h.spatialLayers, h.temporalLayers])
      );
      continue;
    }
    const numel = dims.reduce((a, b) => a * b, 1);
    const data = new Float64Array(numel);
    for (let i = 0; i < numel; i++) data[i] = rng.uniform(-scale, scale);
    tensors.set(name, tensor(dims, data));
  }
  if (preset) {
    const fill = (name: string, value: number) =>
      tensors.set(name, tensor([h.bins], new Array(h.bins).fill(value)));
    fill("controls.p_a", preset.pA);
    fill("controls.p_b", preset.pB);
    fill("controls.beta0", preset.beta0);
    fill("controls.alpha0_ss", preset.alpha0Ss);
    fill("controls.alpha0_nn", preset.alpha0Nn);
  }
  return tensors;
}

function get(tensors: TensorMap, name: string): Tensor {
  const t = tensors.get(name);
  if (!t) throw new Error(`missing tensor ${name}`);
  return t;
}

export function hyperFrom(tensors: TensorMap): Hyper {
  const v = get(tensors, "hyperparams").data;
  return {
    mics: v[0],
    bins: v[1],
    hidden: v[2],
    splits: v[3],
    spatialLayers: v[4],
    temporalLayers: v[5],
  };
}

function sigmoid(x: number): number {
  return 1 / (1 + Math.exp(-x));
}

/** Complex frame as separate planes, each mics x bins, row-major. */
export interface ComplexFrame {
  re: Float64Array;
  im: Float64Array;
}

export class ReferenceNet {
  readonly hyper: Hyper;
  private readonly t: TensorMap;
  /** hidden[layer][split][j] */
  hidden: number[][][];

  constructor(tensors: TensorMap) {
    this.t = tensors;
    this.hyper = hyperFrom(tensors);
    this.hidden = [];
    this.reset();
  }

  reset(): void {
    const hs = this.hyper.hidden / this.hyper.splits;
    this.hidden = [];
    for (let l = 0; l < this.hyper.temporalLayers; l++) {
      const layer: number[][] = [];
      for (let r = 0; r < this.hyper.splits; r++) layer.push(new Array(hs).fill(0));
      this.hidden.push(layer);
    }
  }

  /** Spatial stack only: returns [(2M x F) features, (F) temporal input]. */
  spatialForward(frame: ComplexFrame): { spatial: Float64Array; temporal: Float64Array } {
    const { mics, bins, spatialLayers } = this.hyper;
    let width = 2 * mics;
    let feats = new Float64Array(bins * width); // [f][c]
    for (let k = 0; k < mics; k++) {
      for (let f = 0; f < bins; f++) {
        feats[f * width + 2 * k] = frame.re[k * bins + f];
        feats[f * width + 2 * k + 1] = frame.im[k * bins + f];
      }
    }
    for (let l = 0; l < spatialLayers; l++) {
      const [cin, cout] = spatialChannels(this.hyper, l);
      const w = get(this.t, `spatial.${l}.weight`).data; // [F][cout][cin]
      const slope = get(this.t, `spatial.${l}.prelu`).data;
      const next = new Float64Array(bins * cout);
      for (let f = 0; f < bins; f++) {
        for (let i = 0; i < cout; i++) {
          let acc = 0;
          for (let j = 0; j < cin; j++) {
            acc += w[(f * cout + i) * cin + j] * feats[f * cin + j];
          }
          next[f * cout + i] = acc >= 0 ? acc : slope[i] * acc;
        }
      }
      feats = next;
      width = cout;
    }
    const spatial = new Float64Array(bins * 2 * mics); // [c][f]
    const temporal = new Float64Array(bins);
    for (let f = 0; f < bins; f++) {
      for (let c = 0; c < 2 * mics; c++) spatial[c * bins + f] = feats[f * width + c];
      temporal[f] = feats[f * width + 2 * mics];
    }
    return { spatial, temporal };
  }

  /** One step of one split-GRU layer (mutates this.hidden[layer]). */
  gruLayerStep(layer: number, input: Float64Array): Float64Array {
    const { splits, hidden } = this.hyper;
    const hs = hidden / splits;
    const concat = new Float64Array(hidden);
    for (let r = 0; r < splits; r++) {
      const wIh = get(this.t, `gru.${layer}.split${r}.w_ih`).data;
      const wHh = get(this.t, `gru.${layer}.split${r}.w_hh`).data;
      const bias = get(this.t, `gru.${layer}.split${r}.bias`).data;
      const h = this.hidden[layer][r];
      const x = input.subarray(r * hs, (r + 1) * hs);
      const gx = new Float64Array(3 * hs);
      const gh = new Float64Array(3 * hs);
      for (let i = 0; i < 3 * hs; i++) {
        let ax = 0;
        let ah = 0;
        for (let j = 0; j < hs; j++) {
          ax += wIh[i * hs + j] * x[j];
          ah += wHh[i * hs + j] * h[j];
        }
        gx[i] = ax;
        gh[i] = ah;
      }
      for (let j = 0; j < hs; j++) {
        const reset = sigmoid(gx[j] + gh[j] + bias[j]);
        const update = sigmoid(gx[hs + j] + gh[hs + j] + bias[hs + j]);
        const cand = Math.tanh(gx[2 * hs + j] + bias[2 * hs + j] + reset * gh[2 * hs + j]);
        const next = (1 - update) * cand + update * h[j];
        h[j] = next;
        concat[r * hs + j] = next;
      }
    }
    const out = new Float64Array(hidden);
    for (let k = 0; k < hidden; k++) {
      out[(k % splits) * hs + Math.floor(k / splits)] = concat[k];
    }
    return out;
  }

  /** Full forward pass for one frame; returns the complex mask (M x F planes). */
  maskForward(frame: ComplexFrame): ComplexFrame {
    const { mics, bins, hidden, temporalLayers } = this.hyper;
    const { spatial, temporal } = this.spatialForward(frame);

    const encW = get(this.t, "encoder.weight").data;
    const encB = get(this.t, "encoder.bias").data;
    let feats: Float64Array = new Float64Array(hidden);
    for (let i = 0; i < hidden; i++) {
      let acc = encB[i];
      for (let f = 0; f < bins; f++) acc += encW[i * bins + f] * temporal[f];
      feats[i] = acc;
    }
    for (let l = 0; l < temporalLayers; l++) feats = this.gruLayerStep(l, feats);

    const decW = get(this.t, "decoder.weight").data;
    const decB = get(this.t, "decoder.bias").data;
    const mask = new Float64Array(bins);
    for (let f = 0; f < bins; f++) {
      let acc = decB[f];
      for (let i = 0; i < hidden; i++) acc += decW[f * hidden + i] * feats[i];
      mask[f] = acc;
    }

    const re = new Float64Array(mics * bins);
    const im = new Float64Array(mics * bins);
    for (let k = 0; k < mics; k++) {
      for (let f = 0; f < bins; f++) {
        re[k * bins + f] = mask[f] * spatial[2 * k * bins + f];
        im[k * bins + f] = mask[f] * spatial[(2 * k + 1) * bins + f];
      }
    }
    return { re, im };
  }
}
