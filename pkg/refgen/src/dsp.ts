/**
 * Reference DSP pieces: complex matrix algebra for the filter fixtures and
 * the covariance smoothing recursion.  Complex values travel as (re, im)
 * plane pairs; matrices are row-major M x M.
 */

export interface CMat {
  re: Float64Array;
  im: Float64Array;
  dim: number;
}

export function cmat(dim: number): CMat {
  return { re: new Float64Array(dim * dim), im: new Float64Array(dim * dim), dim };
}

export function rank1Update(
  phi: CMat,
  vRe: Float64Array,
  vIm: Float64Array,
  alpha: number
): void {
  // phi = (1 - alpha) phi + alpha v v^H, then explicit re-hermitization
  const m = phi.dim;
  for (let i = 0; i < m; i++) {
    for (let j = 0; j < m; j++) {
      const oRe = vRe[i] * vRe[j] + vIm[i] * vIm[j];
      const oIm = vIm[i] * vRe[j] - vRe[i] * vIm[j];
      phi.re[i * m + j] = (1 - alpha) * phi.re[i * m + j] + alpha * oRe;
      phi.im[i * m + j] = (1 - alpha) * phi.im[i * m + j] + alpha * oIm;
    }
  }
  for (let i = 0; i < m; i++) {
    for (let j = 0; j < i; j++) {
      const sRe = 0.5 * (phi.re[i * m + j] + phi.re[j * m + i]);
      const sIm = 0.5 * (phi.im[i * m + j] - phi.im[j * m + i]);
      phi.re[i * m + j] = sRe;
      phi.re[j * m + i] = sRe;
      phi.im[i * m + j] = sIm;
      phi.im[j * m + i] = -sIm;
    }
    phi.im[i * m + i] = 0;
  }
}

/** Gauss-Jordan inverse with partial pivoting on an augmented [A | I]. */
export function inverse(a: CMat): CMat {
  const m = a.dim;
  const w = 2 * m;
  const re = new Float64Array(m * w);
  const im = new Float64Array(m * w);
  for (let i = 0; i < m; i++) {
    for (let j = 0; j < m; j++) {
      re[i * w + j] = a.re[i * m + j];
      im[i * w + j] = a.im[i * m + j];
    }
    re[i * w + m + i] = 1;
  }
  for (let k = 0; k < m; k++) {
    let best = k;
    let bestMag = re[k * w + k] ** 2 + im[k * w + k] ** 2;
    for (let r = k + 1; r < m; r++) {
      const mag = re[r * w + k] ** 2 + im[r * w + k] ** 2;
      if (mag > bestMag) {
        best = r;
        bestMag = mag;
      }
    }
    if (bestMag === 0) throw new Error("singular matrix");
    if (best !== k) {
      for (let c = 0; c < w; c++) {
        [re[k * w + c], re[best * w + c]] = [re[best * w + c], re[k * w + c]];
        [im[k * w + c], im[best * w + c]] = [im[best * w + c], im[k * w + c]];
      }
    }
    const pRe = re[k * w + k];
    const pIm = im[k * w + k];
    const inv = 1 / (pRe * pRe + pIm * pIm);
    for (let c = 0; c < w; c++) {
      const xRe = re[k * w + c];
      const xIm = im[k * w + c];
      re[k * w + c] = (xRe * pRe + xIm * pIm) * inv;
      im[k * w + c] = (xIm * pRe - xRe * pIm) * inv;
    }
    for (let r = 0; r < m; r++) {
      if (r === k) continue;
      const fRe = re[r * w + k];
      const fIm = im[r * w + k];
      if (fRe === 0 && fIm === 0) continue;
      for (let c = 0; c < w; c++) {
        const kRe = re[k * w + c];
        const kIm = im[k * w + c];
        re[r * w + c] -= fRe * kRe - fIm * kIm;
        im[r * w + c] -= fRe * kIm + fIm * kRe;
      }
    }
  }
  const out = cmat(m);
  for (let i = 0; i < m; i++) {
    for (let j = 0; j < m; j++) {
      out.re[i * m + j] = re[i * w + m + j];
      out.im[i * m + j] = im[i * w + m + j];
    }
  }
  return out;
}

export function matProduct(a: CMat, b: CMat): CMat {
  const m = a.dim;
  const out = cmat(m);
  for (let i = 0; i < m; i++) {
    for (let j = 0; j < m; j++) {
      let accRe = 0;
      let accIm = 0;
      for (let k = 0; k < m; k++) {
        const aRe = a.re[i * m + k];
        const aIm = a.im[i * m + k];
        const bRe = b.re[k * m + j];
        const bIm = b.im[k * m + j];
        accRe += aRe * bRe - aIm * bIm;
        accIm += aRe * bIm + aIm * bRe;
      }
      out.re[i * m + j] = accRe;
      out.im[i * m + j] = accIm;
    }
  }
  return out;
}

/**
 * Reference filter: gamma = inv(phiNn + load I) phiSs with the relative
 * loading rule, then column `ref` over (beta + Re trace(gamma)).
 */
export function referenceFilter(
  phiSs: CMat,
  phiNn: CMat,
  beta: number,
  ref: number,
  loading: number
): { re: Float64Array; im: Float64Array } {
  const m = phiNn.dim;
  let trace = 0;
  for (let i = 0; i < m; i++) trace += phiNn.re[i * m + i];
  const load = loading * (trace / m) + 1e-12;
  const loaded = cmat(m);
  loaded.re.set(phiNn.re);
  loaded.im.set(phiNn.im);
  for (let i = 0; i < m; i++) loaded.re[i * m + i] += load;
  const gamma = matProduct(inverse(loaded), phiSs);
  let traceGamma = 0;
  for (let i = 0; i < m; i++) traceGamma += gamma.re[i * m + i];
  const denom = beta + traceGamma;
  const re = new Float64Array(m);
  const im = new Float64Array(m);
  for (let i = 0; i < m; i++) {
    re[i] = gamma.re[i * m + ref] / denom;
    im[i] = gamma.im[i * m + ref] / denom;
  }
  return { re, im };
}
