/**
 * Fixture generation entry point.
 *
 * Writes, under --out (default ../tests/fixtures):
 *   weights/w_main.npw1            full-size weights with usable control curves
 *   golden/forward_case*.npw1      20 seeded forward-pass cases (weights +
 *                                  input stream + expected masks)
 *   golden/spatial_case*.npw1      spatial-stack-only cases
 *   golden/gru_case*.npw1          standalone split-GRU sequences
 *   golden/cov_case*.npw1          covariance smoothing trajectories
 *   golden/pmwf_case*.npw1         filter vectors for random PSD pairs
 *   scenes/scene*_{mix,clean}.wav  synthetic multichannel scenes + manifest
 *
 * Everything is a pure function of the seeds recorded in manifest.json;
 * regeneration is byte-identical.
 */

import * as fs from "fs";
import * as path from "path";

import { cmat, rank1Update, referenceFilter } from "./dsp";
import { TensorMap, tensor, writeContainer } from "./npw1";
import { Prng } from "./prng";
import {
  ComplexFrame,
  ControlPreset,
  Hyper,
  PAPER_HYPER,
  ReferenceNet,
  generateWeights,
} from "./refnet";
import { generateScene, measuredSnrDb } from "./scenes";
import { writeWav16 } from "./wav";

export const GOLDEN_TOLERANCE = 1e-4; // relative to the max |expected| per tensor

export const MAIN_WEIGHTS_SEED = 7001;

/** Usable control curves for oracle-mask ablation runs (stand-ins for training). */
export const MAIN_CONTROL_PRESET: ControlPreset = {
  pA: 8.0,
  pB: -4.0,
  beta0: 10.0,
  alpha0Ss: Math.log(0.3 / 0.7), // sigmoid -> 0.3: speech stats adapt fast
  alpha0Nn: Math.log(0.05 / 0.95), // sigmoid -> 0.05: noise stats adapt slowly
};

/** (mics, bins, hidden, splits, spatialLayers, temporalLayers) per case. */
export const FORWARD_CASES: Array<[number, number, number, number, number, number]> = [
  [2, 8, 8, 1, 2, 1],
  [2, 8, 8, 2, 2, 1],
  [2, 8, 8, 4, 2, 2],
  [3, 16, 12, 1, 3, 2],
  [3, 16, 12, 2, 3, 2],
  [3, 16, 12, 3, 3, 1],
  [3, 17, 24, 2, 4, 3],
  [5, 16, 16, 2, 4, 2],
  [5, 33, 24, 4, 4, 3],
  [2, 33, 24, 3, 2, 3],
  [4, 16, 16, 4, 3, 2],
  [4, 8, 8, 2, 4, 1],
  [6, 16, 12, 2, 2, 2],
  [3, 8, 24, 4, 4, 3],
  [5, 17, 12, 1, 4, 2],
  [2, 16, 16, 2, 3, 3],
  [4, 33, 8, 1, 2, 1],
  [6, 8, 12, 3, 3, 2],
  [5, 129, 96, 2, 4, 3],
  [5, 129, 96, 2, 4, 3],
];

export const FORWARD_FRAMES = 10;

function hyperOf(row: [number, number, number, number, number, number]): Hyper {
  return {
    mics: row[0],
    bins: row[1],
    hidden: row[2],
    splits: row[3],
    spatialLayers: row[4],
    temporalLayers: row[5],
  };
}

function randomFrame(rng: Prng, mics: number, bins: number): ComplexFrame {
  const re = new Float64Array(mics * bins);
  const im = new Float64Array(mics * bins);
  for (let i = 0; i < re.length; i++) {
    re[i] = rng.gauss();
    im[i] = rng.gauss();
  }
  return { re, im };
}

/** Quantize a frame to f32 the way the container stores it. */
function quantizeFrame(frame: ComplexFrame): ComplexFrame {
  return {
    re: new Float64Array(Float32Array.from(frame.re)),
    im: new Float64Array(Float32Array.from(frame.im)),
  };
}

export function buildForwardCase(index: number): TensorMap {
  const hyper = hyperOf(FORWARD_CASES[index]);
  const seed = 3000 + index;
  const tensors = generateWeights(seed, hyper);
  const rng = new Prng(5000 + index);
  const net = new ReferenceNet(tensors);
  const t = FORWARD_FRAMES;
  const size = hyper.mics * hyper.bins;
  const inRe = new Float64Array(t * size);
  const inIm = new Float64Array(t * size);
  const outRe = new Float64Array(t * size);
  const outIm = new Float64Array(t * size);
  for (let step = 0; step < t; step++) {
    const frame = quantizeFrame(randomFrame(rng, hyper.mics, hyper.bins));
    const mask = net.maskForward(frame);
    inRe.set(frame.re, step * size);
    inIm.set(frame.im, step * size);
    outRe.set(mask.re, step * size);
    outIm.set(mask.im, step * size);
  }
  const dims = [t, hyper.mics, hyper.bins];
  tensors.set("case.seed", tensor([1], [seed]));
  tensors.set("case.input_re", tensor(dims, inRe));
  tensors.set("case.input_im", tensor(dims, inIm));
  tensors.set("case.mask_re", tensor(dims, outRe));
  tensors.set("case.mask_im", tensor(dims, outIm));
  tensors.set("case.tolerance", tensor([1], [GOLDEN_TOLERANCE]));
  return tensors;
}

export function buildSpatialCase(index: number): TensorMap {
  const hyper = hyperOf(FORWARD_CASES[index]);
  const tensors = generateWeights(3100 + index, hyper);
  const rng = new Prng(5100 + index);
  const net = new ReferenceNet(tensors);
  const frame = quantizeFrame(randomFrame(rng, hyper.mics, hyper.bins));
  const { spatial, temporal } = net.spatialForward(frame);
  tensors.set("case.seed", tensor([1], [3100 + index]));
  tensors.set("case.frame_re", tensor([hyper.mics, hyper.bins], frame.re));
  tensors.set("case.frame_im", tensor([hyper.mics, hyper.bins], frame.im));
  tensors.set("case.spatial_out", tensor([2 * hyper.mics, hyper.bins], spatial));
  tensors.set("case.temporal_in", tensor([hyper.bins], temporal));
  tensors.set("case.tolerance", tensor([1], [GOLDEN_TOLERANCE]));
  return tensors;
}

export function buildGruCase(index: number, hidden: number, splits: number): TensorMap {
  const hyper: Hyper = {
    mics: 1,
    bins: 1,
    hidden,
    splits,
    spatialLayers: 1,
    temporalLayers: 1,
  };
  const tensors: TensorMap = new Map();
  tensors.set("hyperparams", tensor([6], [1, 1, hidden, splits, 1, 1]));
  const rng = new Prng(3200 + index);
  const hs = hidden / splits;
  for (let r = 0; r < splits; r++) {
    for (const part of ["w_ih", "w_hh"]) {
      const data = new Float64Array(3 * hs * hs);
      for (let i = 0; i < data.length; i++) data[i] = rng.uniform(-0.5, 0.5);
      tensors.set(`gru.0.split${r}.${part}`, tensor([3 * hs, hs], data));
    }
    const bias = new Float64Array(3 * hs);
    for (let i = 0; i < bias.length; i++) bias[i] = rng.uniform(-0.5, 0.5);
    tensors.set(`gru.0.split${r}.bias`, tensor([3 * hs], bias));
  }
  const steps = 20;
  const net = new ReferenceNet(tensors);
  const inputs = new Float64Array(steps * hidden);
  const outputs = new Float64Array(steps * hidden);
  for (let s = 0; s < steps; s++) {
    const x = new Float64Array(hidden);
    for (let i = 0; i < hidden; i++) x[i] = Math.fround(rng.gauss());
    const y = net.gruLayerStep(0, x);
    inputs.set(x, s * hidden);
    outputs.set(y, s * hidden);
  }
  tensors.set("case.seed", tensor([1], [3200 + index]));
  tensors.set("case.inputs", tensor([steps, hidden], inputs));
  tensors.set("case.outputs", tensor([steps, hidden], outputs));
  tensors.set("case.tolerance", tensor([1], [GOLDEN_TOLERANCE]));
  return tensors;
}

export function buildCovarianceCase(index: number, mics: number): TensorMap {
  const rng = new Prng(3300 + index);
  const steps = 30;
  const epsilon = 1e-6;
  const speechRe = new Float64Array(steps * mics);
  const speechIm = new Float64Array(steps * mics);
  const noiseRe = new Float64Array(steps * mics);
  const noiseIm = new Float64Array(steps * mics);
  const alphaSs = new Float64Array(steps);
  const alphaNn = new Float64Array(steps);
  for (let i = 0; i < steps * mics; i++) {
    speechRe[i] = Math.fround(rng.gauss());
    speechIm[i] = Math.fround(rng.gauss());
    noiseRe[i] = Math.fround(rng.gauss());
    noiseIm[i] = Math.fround(rng.gauss());
  }
  for (let s = 0; s < steps; s++) {
    alphaSs[s] = Math.fround(rng.uniform(0.05, 0.95));
    alphaNn[s] = Math.fround(rng.uniform(0.05, 0.95));
  }
  const phiSs = cmat(mics);
  const phiNn = cmat(mics);
  for (let i = 0; i < mics; i++) {
    phiSs.re[i * mics + i] = epsilon;
    phiNn.re[i * mics + i] = epsilon;
  }
  const trajSsRe = new Float64Array(steps * mics * mics);
  const trajSsIm = new Float64Array(steps * mics * mics);
  const trajNnRe = new Float64Array(steps * mics * mics);
  const trajNnIm = new Float64Array(steps * mics * mics);
  for (let s = 0; s < steps; s++) {
    rank1Update(
      phiSs,
      speechRe.subarray(s * mics, (s + 1) * mics),
      speechIm.subarray(s * mics, (s + 1) * mics),
      alphaSs[s]
    );
    rank1Update(
      phiNn,
      noiseRe.subarray(s * mics, (s + 1) * mics),
      noiseIm.subarray(s * mics, (s + 1) * mics),
      alphaNn[s]
    );
    trajSsRe.set(phiSs.re, s * mics * mics);
    trajSsIm.set(phiSs.im, s * mics * mics);
    trajNnRe.set(phiNn.re, s * mics * mics);
    trajNnIm.set(phiNn.im, s * mics * mics);
  }
  const t: TensorMap = new Map();
  t.set("case.seed", tensor([1], [3300 + index]));
  t.set("case.meta", tensor([2], [mics, steps]));
  t.set("case.epsilon", tensor([1], [epsilon]));
  t.set("case.speech_re", tensor([steps, mics], speechRe));
  t.set("case.speech_im", tensor([steps, mics], speechIm));
  t.set("case.noise_re", tensor([steps, mics], noiseRe));
  t.set("case.noise_im", tensor([steps, mics], noiseIm));
  t.set("case.alpha_ss", tensor([steps], alphaSs));
  t.set("case.alpha_nn", tensor([steps], alphaNn));
  t.set("case.phi_ss_re", tensor([steps, mics, mics], trajSsRe));
  t.set("case.phi_ss_im", tensor([steps, mics, mics], trajSsIm));
  t.set("case.phi_nn_re", tensor([steps, mics, mics], trajNnRe));
  t.set("case.phi_nn_im", tensor([steps, mics, mics], trajNnIm));
  t.set("case.tolerance", tensor([1], [GOLDEN_TOLERANCE]));
  return t;
}

function randomPsd(rng: Prng, mics: number, ridge: number): { re: Float64Array; im: Float64Array } {
  // G G^H + ridge I with G square gaussian
  const g = new Float64Array(2 * mics * mics);
  for (let i = 0; i < g.length; i++) g[i] = rng.gauss();
  const re = new Float64Array(mics * mics);
  const im = new Float64Array(mics * mics);
  for (let i = 0; i < mics; i++) {
    for (let j = 0; j < mics; j++) {
      let accRe = 0;
      let accIm = 0;
      for (let k = 0; k < mics; k++) {
        const aRe = g[2 * (i * mics + k)];
        const aIm = g[2 * (i * mics + k) + 1];
        const bRe = g[2 * (j * mics + k)];
        const bIm = g[2 * (j * mics + k) + 1];
        accRe += aRe * bRe + aIm * bIm;
        accIm += aIm * bRe - aRe * bIm;
      }
      re[i * mics + j] = accRe;
      im[i * mics + j] = accIm;
    }
    re[i * mics + i] += ridge;
    im[i * mics + i] = 0;
  }
  return { re, im };
}

export function buildPmwfCase(index: number, mics: number): TensorMap {
  const rng = new Prng(3400 + index);
  const batch = 24;
  const loading = 1e-3;
  const ref = 0;
  const ssRe = new Float64Array(batch * mics * mics);
  const ssIm = new Float64Array(batch * mics * mics);
  const nnRe = new Float64Array(batch * mics * mics);
  const nnIm = new Float64Array(batch * mics * mics);
  const betas = new Float64Array(batch);
  const hRe = new Float64Array(batch * mics);
  const hIm = new Float64Array(batch * mics);
  for (let b = 0; b < batch; b++) {
    const ss = randomPsd(rng, mics, 0.0);
    const nn = randomPsd(rng, mics, 0.5);
    betas[b] = Math.fround(rng.uniform(0, 5));
    // quantize inputs first, then compute the expected filter from them
    const q = (x: Float64Array) => new Float64Array(Float32Array.from(x));
    const ssQ = { re: q(ss.re), im: q(ss.im), dim: mics };
    const nnQ = { re: q(nn.re), im: q(nn.im), dim: mics };
    const h = referenceFilter(ssQ, nnQ, betas[b], ref, loading);
    ssRe.set(ssQ.re, b * mics * mics);
    ssIm.set(ssQ.im, b * mics * mics);
    nnRe.set(nnQ.re, b * mics * mics);
    nnIm.set(nnQ.im, b * mics * mics);
    hRe.set(h.re, b * mics);
    hIm.set(h.im, b * mics);
  }
  const t: TensorMap = new Map();
  t.set("case.seed", tensor([1], [3400 + index]));
  t.set("case.meta", tensor([2], [mics, batch]));
  t.set("case.loading", tensor([1], [loading]));
  t.set("case.ref", tensor([1], [ref]));
  t.set("case.phi_ss_re", tensor([batch, mics, mics], ssRe));
  t.set("case.phi_ss_im", tensor([batch, mics, mics], ssIm));
  t.set("case.phi_nn_re", tensor([batch, mics, mics], nnRe));
  t.set("case.phi_nn_im", tensor([batch, mics, mics], nnIm));
  t.set("case.beta", tensor([batch], betas));
  t.set("case.h_re", tensor([batch, mics], hRe));
  t.set("case.h_im", tensor([batch, mics], hIm));
  t.set("case.tolerance", tensor([1], [GOLDEN_TOLERANCE]));
  return t;
}

export interface SceneEntry {
  stem: string;
  seed: number;
  snr_db: number;
  time_varying: boolean;
  mics: number;
  samples: number;
  sample_rate: number;
  noise_gain: number;
}

export function sceneTable(): SceneEntry[] {
  const entries: SceneEntry[] = [];
  const snrs = [-5, 0, 10];
  let index = 0;
  for (const snr of snrs) {
    for (let k = 0; k < 4; k++) {
      entries.push({
        stem: `scene${String(index).padStart(2, "0")}`,
        seed: 9000 + index,
        snr_db: snr,
        time_varying: k >= 2,
        mics: 5,
        samples: 48000,
        sample_rate: 16000,
        noise_gain: 1,
      });
      index += 1;
    }
  }
  entries.push({
    stem: "scene_solo",
    seed: 9100,
    snr_db: 0,
    time_varying: false,
    mics: 5,
    samples: 48000,
    sample_rate: 16000,
    noise_gain: 0,
  });
  return entries;
}

export function generateAll(outDir: string): void {
  const weightsDir = path.join(outDir, "weights");
  const goldenDir = path.join(outDir, "golden");
  const scenesDir = path.join(outDir, "scenes");
  for (const d of [outDir, weightsDir, goldenDir, scenesDir]) {
    fs.mkdirSync(d, { recursive: true });
  }

  fs.writeFileSync(
    path.join(weightsDir, "w_main.npw1"),
    writeContainer(generateWeights(MAIN_WEIGHTS_SEED, PAPER_HYPER, MAIN_CONTROL_PRESET))
  );

  for (let i = 0; i < FORWARD_CASES.length; i++) {
    const name = `forward_case${String(i).padStart(2, "0")}.npw1`;
    fs.writeFileSync(path.join(goldenDir, name), writeContainer(buildForwardCase(i)));
  }
  for (let i = 0; i < 3; i++) {
    fs.writeFileSync(
      path.join(goldenDir, `spatial_case${i}.npw1`),
      writeContainer(buildSpatialCase([3, 7, 8][i]))
    );
  }
  const gruShapes: Array<[number, number]> = [
    [8, 1],
    [12, 2],
    [12, 3],
  ];
  gruShapes.forEach(([hidden, splits], i) => {
    fs.writeFileSync(
      path.join(goldenDir, `gru_case${i}.npw1`),
      writeContainer(buildGruCase(i, hidden, splits))
    );
  });
  [2, 5].forEach((mics, i) => {
    fs.writeFileSync(
      path.join(goldenDir, `cov_case${i}.npw1`),
      writeContainer(buildCovarianceCase(i, mics))
    );
  });
  [2, 5].forEach((mics, i) => {
    fs.writeFileSync(
      path.join(goldenDir, `pmwf_case${i}.npw1`),
      writeContainer(buildPmwfCase(i, mics))
    );
  });

  const entries = sceneTable();
  for (const entry of entries) {
    const scene = generateScene({
      seed: entry.seed,
      snrDb: entry.snr_db,
      timeVarying: entry.time_varying,
      mics: entry.mics,
      seconds: entry.samples / entry.sample_rate,
      sampleRate: entry.sample_rate,
      noiseGain: entry.noise_gain,
      integerDelays: entry.noise_gain === 0,
    });
    fs.writeFileSync(
      path.join(scenesDir, `${entry.stem}_mix.wav`),
      writeWav16(scene.mixture, entry.sample_rate)
    );
    fs.writeFileSync(
      path.join(scenesDir, `${entry.stem}_clean.wav`),
      writeWav16(scene.clean, entry.sample_rate)
    );
  }
  fs.writeFileSync(path.join(scenesDir, "scenes.json"), JSON.stringify(entries, null, 2) + "\n");

  const manifest = {
    generator: "refgen",
    golden_tolerance: GOLDEN_TOLERANCE,
    tolerance_mode: "max absolute error over max absolute expected value",
    main_weights_seed: MAIN_WEIGHTS_SEED,
    forward_cases: FORWARD_CASES.length,
    forward_frames: FORWARD_FRAMES,
  };
  fs.writeFileSync(path.join(outDir, "manifest.json"), JSON.stringify(manifest, null, 2) + "\n");
}

function main(): void {
  const args = process.argv.slice(2);
  let out = path.join(__dirname, "..", "..", "tests", "fixtures");
  for (let i = 0; i < args.length; i++) {
    if (args[i] === "--out" && i + 1 < args.length) out = args[i + 1];
  }
  generateAll(out);
  console.log(`fixtures written to ${out}`);
}

if (require.main === module) main();
