"""Acceptance suite: one test per release criterion, one printed verdict each.

Run as `pytest tests/test_acceptance.py -v -s` to see the pass/fail lines.
All tolerances are fixed here; the ablation and trajectory targets are
regression-pinned from the first verified run of this build.
"""

import glob
import json
import os
import time

import numpy as np
import pytest

from pmwfnet.covariance import init_state, update
from pmwfnet.engine import EngineConfig, StreamEngine
from pmwfnet.masknet import (
    RecurrentState,
    load_weights_file,
    mask_forward,
    split_gru_step,
)
from pmwfnet.metrics import snr
from pmwfnet.npw1 import read_container_file
from pmwfnet.pmwf import apply_filter, compute_filter
from pmwfnet.report import complexity_report
from pmwfnet.stft import StftConfig, StreamAnalyzer
from pmwfnet.wavio import read_wav

from conftest import fixture_path, random_frame, random_psd, random_weights
from test_golden import complex_case, forward_case_files, rel_max_err
from test_masknet import dense_gru_step
from test_stft import run_round_trip

RESULTS = []


def verdict(name, detail):
    line = f"[PASS] {name}: {detail}"
    RESULTS.append(line)
    print(f"\n{line}")


@pytest.fixture(scope="module")
def main_weights():
    return load_weights_file(fixture_path("weights", "w_main.npw1"))


def scene_paths(stem):
    return (
        fixture_path("scenes", f"{stem}_mix.wav"),
        fixture_path("scenes", f"{stem}_clean.wav"),
    )


def test_pmwf_correctness_suite(rng):
    start = time.perf_counter()
    # scalar Wiener reduction: beta = 1, M = 1
    for _ in range(20):
        s, n = rng.uniform(0.1, 5.0, 2)
        h = compute_filter(np.array([[n + 0j]]), np.array([[s + 0j]]), 1.0, loading=0.0)
        assert h[0].real == pytest.approx(s / (s + n), rel=1e-9)

    # distortionless pass-through of rank-1 speech under beta = 0
    worst = 0.0
    for _ in range(200):
        m = int(rng.integers(2, 7))
        d = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        phi_ss = rng.uniform(0.1, 10.0) * np.outer(d, d.conj())
        phi_nn = random_psd(rng, m) + (0.1 + rng.uniform(0, 1)) * np.eye(m)
        s = rng.standard_normal() + 1j * rng.standard_normal()
        h = compute_filter(phi_nn, phi_ss, 0.0, loading=0.0)
        err = abs(apply_filter(h, s * d) - s * d[0]) / max(abs(s * d[0]), 1e-12)
        worst = max(worst, err)
    assert worst < 1e-6

    # strictly decreasing filter norm over the distortion sweep
    for _ in range(20):
        phi_nn = random_psd(rng, 5) + np.eye(5)
        phi_ss = random_psd(rng, 5)
        norms = [
            np.linalg.norm(compute_filter(phi_nn, phi_ss, b, loading=0.0))
            for b in (0.0, 0.5, 1.0, 2.0, 10.0)
        ]
        assert all(a > b for a, b in zip(norms, norms[1:]))

    elapsed = time.perf_counter() - start
    assert elapsed < 5.0
    verdict(
        "pmwf-correctness",
        f"scalar Wiener exact, 200 distortionless cases worst err {worst:.2e}, "
        f"monotone norm sweep, {elapsed:.2f}s < 5s",
    )


def test_covariance_suite(rng):
    # 10k random rank-1 updates across 50 bins: symmetry and PSD must survive
    bins, mics = 50, 4
    state = init_state(mics, bins, 1e-6)
    for _ in range(100):
        update(
            state,
            random_frame(rng, mics, bins),
            random_frame(rng, mics, bins),
            rng.uniform(0, 1, bins),
            rng.uniform(0, 1, bins),
        )
    herm_err = 0.0
    min_eig = np.inf
    for mats in (state.speech, state.noise):
        herm_err = max(herm_err, np.abs(mats - mats.conj().transpose(0, 2, 1)).max())
        for w in range(bins):
            eigs = np.linalg.eigvalsh(mats[w])
            min_eig = min(min_eig, eigs.min() / max(np.trace(mats[w]).real, 1e-300))
    assert herm_err < 1e-10
    assert min_eig >= -1e-10

    # cumulative mean (alpha = 1/t) equals direct averaging
    frames = 2000
    state = init_state(3, 1, 1e-6)
    acc = np.zeros((3, 3), dtype=complex)
    chol = np.linalg.cholesky(np.array([[2.0, 0.5, 0.1], [0.5, 1.5, 0.3], [0.1, 0.3, 1.0]]))
    for t in range(1, frames + 1):
        v = chol @ ((rng.standard_normal(3) + 1j * rng.standard_normal(3)) / np.sqrt(2))
        acc += np.outer(v, v.conj())
        alpha = np.array([1.0 / t])
        update(state, v[:, None], v[:, None], alpha, alpha)
    direct = acc / frames
    cum_err = np.abs(state.speech[0] - direct).max() / np.abs(direct).max()
    assert cum_err < 1e-9
    sigma = chol @ chol.conj().T
    cum_conv = np.linalg.norm(state.speech[0] - sigma) / np.linalg.norm(sigma)
    assert cum_conv < 0.10

    # stationary convergence, fixed alpha = 0.1: Monte-Carlo mean over 100
    # independent streams (bins double as streams here)
    streams = 100
    state = init_state(3, streams, 1e-6)
    alpha = np.full(streams, 0.1)
    for _ in range(2000):
        v = chol @ (
            (rng.standard_normal((3, streams)) + 1j * rng.standard_normal((3, streams)))
            / np.sqrt(2)
        )
        update(state, v, v, alpha, alpha)
    mc_err = np.linalg.norm(state.noise.mean(axis=0) - sigma) / np.linalg.norm(sigma)
    assert mc_err < 0.10

    verdict(
        "covariance",
        f"10k updates herm err {herm_err:.1e}, cum-mean err {cum_err:.1e}, "
        f"convergence {cum_conv:.1%} (cum) / {mc_err:.1%} (fixed alpha MC), both < 10%",
    )


def test_stft_suite(rng):
    white = rng.standard_normal(16000)
    shaped = np.cumsum(rng.standard_normal(16000))
    shaped -= shaped.mean()
    errs = []
    for signal in (white, shaped):
        out = run_round_trip(signal)
        errs.append(
            np.linalg.norm(out[256:] - signal[256:]) / np.linalg.norm(signal[256:])
        )
    assert max(errs) < 1e-6

    # latency: an impulse lands exactly one window minus one hop later
    x = np.zeros(1024)
    x[300] = 1.0
    cfg = StftConfig()
    from pmwfnet.stft import StreamSynthesizer

    analyzer, synth = StreamAnalyzer(cfg, 1), StreamSynthesizer(cfg)
    raw = np.concatenate(
        [
            synth.synthesize_frame(analyzer.analyze_frame(x[None, t * 128 : (t + 1) * 128])[0])
            for t in range(8)
        ]
    )
    assert np.abs(raw).argmax() == 300 + 128

    # linearity at matched stream states
    a, b = 0.7, -1.3
    xs = rng.standard_normal((1, 128 * 4))
    ys = rng.standard_normal((1, 128 * 4))
    an_x, an_y, an_mix = (StreamAnalyzer(cfg, 1) for _ in range(3))
    lin_err = 0.0
    for t in range(4):
        sl = np.s_[:, t * 128 : (t + 1) * 128]
        fx, fy = an_x.analyze_frame(xs[sl]), an_y.analyze_frame(ys[sl])
        fmix = an_mix.analyze_frame(a * xs[sl] + b * ys[sl])
        combined = a * fx + b * fy
        lin_err = max(
            lin_err, np.abs(fmix - combined).max() / max(np.abs(combined).max(), 1.0)
        )
    assert lin_err < 1e-10
    verdict(
        "stft",
        f"round trip errs {errs[0]:.1e}/{errs[1]:.1e} < 1e-6, latency 128 exact, "
        f"linearity {lin_err:.1e} < 1e-10",
    )


def test_neural_inference_suite(rng):
    # split count 1 equals a dense GRU over 50 steps
    h = 12
    w_ih = rng.uniform(-0.5, 0.5, (3 * h, h))
    w_hh = rng.uniform(-0.5, 0.5, (3 * h, h))
    bias = rng.uniform(-0.5, 0.5, 3 * h)
    split_state = np.zeros((1, h))
    dense_state = np.zeros(h)
    gru_err = 0.0
    for _ in range(50):
        x = rng.standard_normal(h)
        split_state, out = split_gru_step(w_ih[None], w_hh[None], bias[None], split_state, x)
        dense_state = dense_gru_step(w_ih, w_hh, bias, dense_state, x)
        gru_err = max(
            gru_err, np.abs(out - dense_state).max() / max(np.abs(dense_state).max(), 1e-30)
        )
    assert gru_err < 1e-6

    # causality by truncation and bitwise determinism
    w = random_weights(rng)
    frames = [random_frame(rng, 5, 129) for _ in range(10)]
    state = RecurrentState(w.hyper)
    full = [mask_forward(w, state, f)[0] for f in frames]
    state = RecurrentState(w.hyper)
    for got, want in zip([mask_forward(w, state, f)[0] for f in frames[:5]], full[:5]):
        assert np.array_equal(got, want)
    state = RecurrentState(w.hyper)
    rerun = [mask_forward(w, state, f)[0] for f in frames]
    assert all(np.array_equal(a, b) for a, b in zip(full, rerun))

    # committed golden fixtures from the independent generator
    worst = 0.0
    cases = forward_case_files()
    assert len(cases) == 20
    for path in cases:
        weights = load_weights_file(path)
        tensors = read_container_file(path)
        inputs = complex_case(tensors, "case.input")
        expected = complex_case(tensors, "case.mask")
        tol = float(tensors["case.tolerance"][0])
        st = RecurrentState(weights.hyper)
        for t in range(inputs.shape[0]):
            mask, _ = mask_forward(weights, st, inputs[t])
            err = rel_max_err(mask, expected[t])
            worst = max(worst, err)
            assert err < tol
    verdict(
        "neural-inference",
        f"split-vs-dense {gru_err:.1e} < 1e-6, causal, deterministic, "
        f"20 golden cases worst {worst:.1e} < 1e-4",
    )


def test_complexity_report(main_weights):
    report = complexity_report(main_weights)
    param_err = abs(report.params_total - 164_900) / 164_900
    mac_err = abs(report.mmacs_per_second - 24.95) / 24.95
    assert param_err <= 0.05
    assert mac_err <= 0.15
    verdict(
        "complexity",
        f"{report.params_total} params ({param_err:+.1%} of 164.9k, band 5%), "
        f"{report.mmacs_per_second:.2f} MMAC/s ({mac_err:+.1%} of 24.95, band 15%)",
    )


def test_ablation_orderings(main_weights):
    start = time.perf_counter()
    with open(fixture_path("scenes", "scenes.json")) as fh:
        scenes = [s for s in json.load(fh) if s["stem"] != "scene_solo"]
    assert len(scenes) == 12

    def run(stem, **kw):
        mix_path, clean_path = scene_paths(stem)
        mix = read_wav(mix_path)
        clean = read_wav(clean_path)
        engine = StreamEngine(main_weights, EngineConfig(mask_provider="oracle", **kw))
        out = engine.enhance(mix.samples, clean.samples)
        return snr(clean.samples[0], out)

    fixed_alpha = dict(alpha_mode="fixed", alpha_value=0.1)
    means = {}
    for name, kw in {
        "beta_fixed_0": dict(beta_mode="fixed", beta_value=0.0, **fixed_alpha),
        "beta_fixed_1": dict(beta_mode="fixed", beta_value=1.0, **fixed_alpha),
        "beta_fixed_10": dict(beta_mode="fixed", beta_value=10.0, **fixed_alpha),
        "beta_spp": dict(beta_mode="spp", **fixed_alpha),
    }.items():
        means[name] = float(np.mean([run(s["stem"], **kw) for s in scenes]))

    # (a) SPP-driven distortion control wins, mirroring the published ordering
    for fixed in ("beta_fixed_0", "beta_fixed_1", "beta_fixed_10"):
        assert means["beta_spp"] >= means[fixed] - 0.1, (fixed, means)
    assert means["beta_spp"] >= means["beta_fixed_10"] + 1.0, means

    # (b) exponential smoothing beats the cumulative mean on moving noise
    tv = [s for s in scenes if s["time_varying"]]
    assert len(tv) == 6
    tv_means = {}
    for name, kw in {
        "alpha_fixed": dict(beta_mode="fixed", beta_value=0.0, **fixed_alpha),
        "alpha_cum": dict(beta_mode="fixed", beta_value=0.0, alpha_mode="cum_mean"),
    }.items():
        tv_means[name] = float(np.mean([run(s["stem"], **kw) for s in tv]))
    assert tv_means["alpha_fixed"] >= tv_means["alpha_cum"] + 0.5, tv_means

    # regression pins from the first verified run
    pinned = {
        "beta_fixed_0": 11.0771,
        "beta_fixed_1": 14.9096,
        "beta_fixed_10": 10.8956,
        "beta_spp": 14.9862,
    }
    for name, want in pinned.items():
        assert means[name] == pytest.approx(want, abs=0.1), (name, means[name])
    assert tv_means["alpha_fixed"] == pytest.approx(11.1889, abs=0.1)
    assert tv_means["alpha_cum"] == pytest.approx(8.2610, abs=0.1)

    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    verdict(
        "ablation-ordering",
        f"spp {means['beta_spp']:.2f} dB >= fixed betas "
        f"({means['beta_fixed_0']:.2f}/{means['beta_fixed_1']:.2f}/{means['beta_fixed_10']:.2f}) - 0.1, "
        f"beats beta=10 by {means['beta_spp'] - means['beta_fixed_10']:.2f} dB >= 1; "
        f"smoothing beats cum-mean by {tv_means['alpha_fixed'] - tv_means['alpha_cum']:.2f} dB >= 0.5; "
        f"{elapsed:.0f}s < 120s",
    )


def test_throughput(main_weights, rng):
    x = 0.1 * rng.standard_normal((5, 160000))  # 10 s of 5-channel audio
    best = np.inf
    for _ in range(3):
        engine = StreamEngine(main_weights, EngineConfig())
        start = time.perf_counter()
        out = engine.enhance(x)
        best = min(best, time.perf_counter() - start)
        assert out.shape == (160000,)
    assert best < 1.0
    verdict("throughput", f"10s of 5-channel audio in {best:.2f}s < 1s (best of 3)")


def test_reference_agreement_summary():
    # secondary criterion, primary half: the committed cross-implementation
    # fixtures agree (regeneration byte-identity is asserted in refgen's own
    # suite); detailed per-case checks live in test_golden.py
    cases = forward_case_files()
    assert len(cases) == 20
    verdict("reference-agreement", "20 seeded forward cases present and checked <= 1e-4")
