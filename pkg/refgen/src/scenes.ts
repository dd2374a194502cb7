/**
 * Synthetic multichannel test scenes.
 *
 * One speech-shaped source (lowpassed Gaussian noise under a syllabic
 * on/off envelope) is imaged onto M channels with per-channel gains and
 * integer-plus-fractional delays (windowed-sinc interpolation), then
 * diffuse Gaussian noise is added at an exact target SNR measured on the
 * reference channel.  Time-varying scenes step the noise level up by a
 * factor of three at the midpoint (100 ms crossfade).  Mixture and clean
 * images are jointly peak-normalized so the pair stays aligned and keeps
 * the configured SNR.
 */

import { Prng } from "./prng";

export interface SceneSpec {
  seed: number;
  snrDb: number;
  timeVarying: boolean;
  mics: number;
  seconds: number;
  sampleRate: number;
  /** zero disables the noise entirely (mixture equals the clean image) */
  noiseGain: number;
  /** integer-only channel delays (used by the passthrough test scene) */
  integerDelays: boolean;
}

export function defaultSpec(partial: Partial<SceneSpec>): SceneSpec {
  return {
    seed: 0,
    snrDb: 0,
    timeVarying: false,
    mics: 5,
    seconds: 3,
    sampleRate: 16000,
    noiseGain: 1,
    integerDelays: false,
    ...partial,
  };
}

export interface Scene {
  clean: Float64Array[]; // per channel source images
  mixture: Float64Array[];
  spec: SceneSpec;
}

const SINC_HALF = 31; // 63-tap Hann-windowed sinc interpolator

function fractionalDelay(x: Float64Array, delay: number): Float64Array {
  const n = x.length;
  const whole = Math.floor(delay);
  const frac = delay - whole;
  const out = new Float64Array(n);
  if (frac === 0) {
    for (let i = whole; i < n; i++) out[i] = x[i - whole];
    return out;
  }
  const taps = new Float64Array(2 * SINC_HALF + 1);
  for (let j = 0; j <= 2 * SINC_HALF; j++) {
    const t = j - SINC_HALF - frac;
    const sinc = t === 0 ? 1 : Math.sin(Math.PI * t) / (Math.PI * t);
    const win = 0.5 + 0.5 * Math.cos((Math.PI * (j - SINC_HALF)) / (SINC_HALF + 1));
    taps[j] = sinc * win;
  }
  for (let i = 0; i < n; i++) {
    let acc = 0;
    for (let j = 0; j <= 2 * SINC_HALF; j++) {
      const src = i - whole - j + SINC_HALF;
      if (src >= 0 && src < n) acc += taps[j] * x[src];
    }
    out[i] = acc;
  }
  return out;
}

function speechShapedSource(rng: Prng, n: number, sampleRate: number): Float64Array {
  const raw = new Float64Array(n);
  // lowpassed noise with a DC blocker: crude long-term speech spectrum
  let lp = 0;
  let dcX = 0;
  let dcY = 0;
  for (let i = 0; i < n; i++) {
    lp = 0.93 * lp + 0.07 * rng.gauss();
    const y = lp - dcX + 0.995 * dcY;
    dcX = lp;
    dcY = y;
    raw[i] = y;
  }
  // syllabic envelope: alternating active/pause segments, smooth ramps
  const env = new Float64Array(n);
  const ramp = Math.round(0.02 * sampleRate);
  let pos = 0;
  let active = true;
  while (pos < n) {
    const dur = Math.round(
      (active ? rng.uniform(0.25, 0.5) : rng.uniform(0.12, 0.3)) * sampleRate
    );
    const end = Math.min(pos + dur, n);
    if (active) {
      for (let i = pos; i < end; i++) {
        const up = Math.min(1, (i - pos) / ramp);
        const down = Math.min(1, (end - 1 - i) / ramp);
        env[i] = Math.min(up, down);
      }
    }
    pos = end;
    active = !active;
  }
  let energy = 0;
  for (let i = 0; i < n; i++) {
    raw[i] *= env[i];
    energy += raw[i] * raw[i];
  }
  const rms = Math.sqrt(energy / n) || 1;
  const target = 0.08;
  for (let i = 0; i < n; i++) raw[i] *= target / rms;
  return raw;
}

export function generateScene(partial: Partial<SceneSpec>): Scene {
  const spec = defaultSpec(partial);
  const rng = new Prng(spec.seed);
  const n = Math.round(spec.seconds * spec.sampleRate);
  const source = speechShapedSource(rng, n, spec.sampleRate);

  const clean: Float64Array[] = [];
  for (let c = 0; c < spec.mics; c++) {
    const gain = c === 0 ? 1 : rng.uniform(0.75, 1.05);
    let delay = c === 0 ? 0 : rng.uniform(0.3, 3.0);
    if (spec.integerDelays) delay = Math.round(delay);
    const image = fractionalDelay(source, delay);
    for (let i = 0; i < n; i++) image[i] *= gain;
    clean.push(image);
  }

  // noise level profile: flat, or stepping up by 3x at the midpoint
  const profile = new Float64Array(n).fill(1);
  if (spec.timeVarying) {
    const mid = Math.floor(n / 2);
    const fade = Math.round(0.1 * spec.sampleRate);
    for (let i = 0; i < n; i++) {
      if (i >= mid + fade) profile[i] = 3;
      else if (i > mid) profile[i] = 1 + 2 * (0.5 - 0.5 * Math.cos((Math.PI * (i - mid)) / fade));
    }
  }
  const noise: Float64Array[] = [];
  for (let c = 0; c < spec.mics; c++) {
    const ch = new Float64Array(n);
    for (let i = 0; i < n; i++) ch[i] = rng.gauss() * profile[i];
    noise.push(ch);
  }

  // scale the noise for the exact target SNR at the reference channel
  let es = 0;
  let en = 0;
  for (let i = 0; i < n; i++) {
    es += clean[0][i] ** 2;
    en += noise[0][i] ** 2;
  }
  const noiseScale =
    spec.noiseGain === 0 ? 0 : spec.noiseGain * Math.sqrt(es / en / Math.pow(10, spec.snrDb / 10));

  const mixture: Float64Array[] = [];
  let peak = 0;
  for (let c = 0; c < spec.mics; c++) {
    const mix = new Float64Array(n);
    for (let i = 0; i < n; i++) {
      mix[i] = noiseScale === 0 ? clean[c][i] : clean[c][i] + noiseScale * noise[c][i];
      const a = Math.abs(mix[i]);
      if (a > peak) peak = a;
      const b = Math.abs(clean[c][i]);
      if (b > peak) peak = b;
    }
    mixture.push(mix);
  }
  const norm = peak > 0.98 ? 0.98 / peak : 1;
  if (norm !== 1) {
    for (let c = 0; c < spec.mics; c++) {
      for (let i = 0; i < n; i++) {
        mixture[c][i] *= norm;
        clean[c][i] *= norm;
      }
    }
  }
  return { clean, mixture, spec };
}

/** SNR of the generated pair at the reference channel, for verification. */
export function measuredSnrDb(scene: Scene): number {
  let es = 0;
  let en = 0;
  for (let i = 0; i < scene.clean[0].length; i++) {
    es += scene.clean[0][i] ** 2;
    en += (scene.mixture[0][i] - scene.clean[0][i]) ** 2;
  }
  return 10 * Math.log10(es / en);
}
