"""Streaming orchestration of the full enhancement pipeline.

Per hop of input samples: analyze -> mask -> signal split -> controls ->
covariance update -> filter computation -> filter application -> synthesize.
The filter at frame t uses statistics including frame t.  Output is the
enhanced reference-channel estimate, mono, delayed by one window minus one
hop; ``enhance`` compensates that latency so the output file aligns with the
input sample-for-sample.

Mask providers:
    neural    mask network forward pass (default)
    oracle    ratio mask from an aligned clean multichannel reference,
              magnitude-clipped for the signal path only
    identity  all-ones mask (pass-through statistics)
    file      per-frame masks from an NPW1 container (tensors ``mask_re``
              and ``mask_im`` of shape (T, M, F); streams longer than T
              reuse the final frame)
"""

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .controls import (
    ALPHA_MODES,
    BETA_MODES,
    ControlParams,
    compute_alphas,
    compute_beta,
    estimate_spp,
)
from .covariance import init_state, update
from .errors import ChannelMismatch, MissingTensor, ShapeMismatch
from .masknet import ModelWeights, RecurrentState, mask_forward
from .npw1 import read_container_file
from .pmwf import FilterBank, apply_filter_bank, compute_filter_bank
from .stft import StftConfig, StreamAnalyzer, StreamSynthesizer

MASK_PROVIDERS = ("neural", "oracle", "file", "identity")


@dataclass(frozen=True)
class EngineConfig:
    stft: StftConfig = field(default_factory=StftConfig)
    beta_mode: str = "spp"
    beta_value: float = 1.0
    alpha_mode: str = "freq"
    alpha_value: float = 0.1
    loading: float = 1e-3
    ref_channel: int = 0
    mask_provider: str = "neural"
    mask_path: str | None = None
    epsilon_init: float = 1e-6
    oracle_floor: float = 1e-9
    mask_clip: float = 10.0

    def __post_init__(self):
        if self.beta_mode not in BETA_MODES:
            raise ValueError(f"unknown beta mode {self.beta_mode!r}")
        if self.alpha_mode not in ALPHA_MODES:
            raise ValueError(f"unknown alpha mode {self.alpha_mode!r}")
        if self.mask_provider not in MASK_PROVIDERS:
            raise ValueError(f"unknown mask provider {self.mask_provider!r}")
        if self.epsilon_init <= 0:
            raise ValueError("epsilon_init must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "EngineConfig":
        known = {
            "beta_mode", "beta_value", "alpha_mode", "alpha_value", "loading",
            "ref_channel", "mask_provider", "mask_path", "epsilon_init",
        }
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "EngineConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def separate(mask, frame):
    """Split a frame into speech and noise estimates via the complex mask.

    speech = mask * frame elementwise per channel, noise = frame - speech;
    the two always sum back to the frame exactly.
    """
    mask = np.asarray(mask)
    frame = np.asarray(frame)
    if mask.shape != frame.shape:
        raise ShapeMismatch(f"mask {mask.shape} vs frame {frame.shape}")
    speech = mask * frame
    return speech, frame - speech


def oracle_mask(frame, clean_frame, floor=1e-9, clip=10.0):
    """Ratio mask clean/mixture per channel and bin.

    Bins with |mixture| below ``floor`` get a zero mask; mask magnitude is
    clipped to ``clip``.
    """
    frame = np.asarray(frame)
    clean_frame = np.asarray(clean_frame)
    if frame.shape != clean_frame.shape:
        raise ShapeMismatch(f"frame {frame.shape} vs reference {clean_frame.shape}")
    raw = _ratio_mask(frame, clean_frame, floor)
    return _clip_mask(raw, clip)


def _ratio_mask(frame, clean_frame, floor):
    mag = np.abs(frame)
    tiny = mag < floor
    return np.where(tiny, 0.0, clean_frame / np.where(tiny, 1.0, frame))


def _clip_mask(mask, clip):
    mag = np.abs(mask)
    over = mag > clip
    if not over.any():
        return mask
    return np.where(over, mask * (clip / np.where(over, mag, 1.0)), mask)


class StreamEngine:
    """One enhancement stream; single-writer state, frame-exact deterministic."""

    def __init__(self, weights: ModelWeights, config: EngineConfig = EngineConfig()):
        self.weights = weights
        self.config = config
        self.channels = weights.hyper.mics
        cfg = config.stft
        if weights.hyper.bins != cfg.n_bins:
            raise ShapeMismatch(
                f"weights expect {weights.hyper.bins} bins, transform has {cfg.n_bins}"
            )
        self.params = ControlParams(
            p_a=weights.p_a,
            p_b=weights.p_b,
            beta0=weights.beta0,
            alpha0_ss=weights.alpha0_ss,
            alpha0_nn=weights.alpha0_nn,
            beta_mode=config.beta_mode,
            beta_value=config.beta_value,
            alpha_mode=config.alpha_mode,
            alpha_value=config.alpha_value,
        )
        self.analyzer = StreamAnalyzer(cfg, self.channels)
        self.ref_analyzer = (
            StreamAnalyzer(cfg, self.channels) if config.mask_provider == "oracle" else None
        )
        self.synthesizer = StreamSynthesizer(cfg)
        self.recurrent = RecurrentState(weights.hyper)
        self.cov = init_state(self.channels, cfg.n_bins, config.epsilon_init)
        self.bank = FilterBank(cfg.n_bins, self.channels)
        self.frame_index = 0
        self._file_masks = None
        if config.mask_provider == "file":
            self._file_masks = _load_mask_file(config.mask_path, self.channels, cfg.n_bins)
        # fixed and freq alpha modes are time-invariant: evaluate them once
        self._static_alphas = None
        if config.alpha_mode in ("fixed", "freq"):
            self._static_alphas = compute_alphas(self.params, None, 1)

    def _mask_for(self, frame, ref_frame):
        """Return (mask for the signal path, |mask| at ref channel for SPP)."""
        cfg = self.config
        ref = cfg.ref_channel
        if cfg.mask_provider == "neural":
            mask, _ = mask_forward(self.weights, self.recurrent, frame)
            return mask, np.abs(mask[ref])
        if cfg.mask_provider == "identity":
            mask = np.ones(frame.shape, dtype=np.complex128)
            return mask, np.ones(frame.shape[1])
        if cfg.mask_provider == "oracle":
            if ref_frame is None:
                raise ValueError("oracle mask provider needs reference samples")
            raw = _ratio_mask(frame, ref_frame, cfg.oracle_floor)
            # SPP input stays unclipped; only the signal path is clipped
            return _clip_mask(raw, cfg.mask_clip), np.abs(raw[ref])
        idx = min(self.frame_index - 1, self._file_masks.shape[0] - 1)
        mask = self._file_masks[idx]
        return mask, np.abs(mask[ref])

    def process_frame(self, hop_samples, ref_hop=None):
        """Consume one hop of multichannel samples, emit one hop of mono output."""
        cfg = self.config
        self.frame_index += 1
        frame = self.analyzer.analyze_frame(hop_samples)
        ref_frame = None
        if self.ref_analyzer is not None:
            if ref_hop is None:
                raise ValueError("oracle mask provider needs reference samples")
            ref_frame = self.ref_analyzer.analyze_frame(ref_hop)

        mask, spp_mag = self._mask_for(frame, ref_frame)
        speech_est, noise_est = separate(mask, frame)

        spp = estimate_spp(self.params, spp_mag)
        beta = compute_beta(self.params, spp, self.frame_index)
        if self._static_alphas is not None:
            alpha_ss, alpha_nn = self._static_alphas
        else:
            alpha_ss, alpha_nn = compute_alphas(self.params, spp, self.frame_index)
        update(self.cov, speech_est, noise_est, alpha_ss, alpha_nn)

        h, valid = compute_filter_bank(
            self.cov.speech, self.cov.noise, beta,
            ref_channel=cfg.ref_channel, loading=cfg.loading,
        )
        if valid.all():
            self.bank.h = h
            self.bank.valid[:] = True
        else:
            self.bank.h[valid] = h[valid]
            self.bank.valid |= valid

        out_spec = apply_filter_bank(self.bank.h, frame)
        return self.synthesizer.synthesize_frame(out_spec)

    def enhance(self, samples, reference=None):
        """Process a whole (M, N) buffer; returns the (N,) aligned mono output."""
        samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
        if samples.shape[0] != self.channels:
            raise ChannelMismatch(
                f"expected {self.channels} channels, got {samples.shape[0]}"
            )
        if reference is not None:
            reference = np.atleast_2d(np.asarray(reference, dtype=np.float64))
            if reference.shape != samples.shape:
                raise ShapeMismatch(
                    f"reference {reference.shape} vs input {samples.shape}"
                )
        cfg = self.config.stft
        n = samples.shape[1]
        frames = math.ceil(n / cfg.hop) + cfg.latency_samples // cfg.hop
        total = frames * cfg.hop
        padded = np.zeros((self.channels, total))
        padded[:, :n] = samples
        ref_padded = None
        if reference is not None:
            ref_padded = np.zeros((self.channels, total))
            ref_padded[:, :n] = reference
        out = np.empty(total)
        for t in range(frames):
            lo, hi = t * cfg.hop, (t + 1) * cfg.hop
            chunk = padded[:, lo:hi]
            ref_chunk = None if ref_padded is None else ref_padded[:, lo:hi]
            out[lo:hi] = self.process_frame(chunk, ref_chunk)
        return out[cfg.latency_samples : cfg.latency_samples + n]


def _load_mask_file(path, channels, bins):
    if path is None:
        raise ValueError("mask provider 'file' needs mask_path")
    tensors = read_container_file(path)
    for name in ("mask_re", "mask_im"):
        if name not in tensors:
            raise MissingTensor(name)
    re, im = tensors["mask_re"], tensors["mask_im"]
    if re.shape != im.shape or re.ndim != 3 or re.shape[1:] != (channels, bins):
        raise ShapeMismatch(
            f"mask file must be (T, {channels}, {bins}); got {re.shape} / {im.shape}"
        )
    if re.shape[0] < 1:
        raise ShapeMismatch("mask file holds no frames")
    return re.astype(np.float64) + 1j * im.astype(np.float64)


def make_config(stft: StftConfig | None = None, **kwargs) -> EngineConfig:
    """Convenience constructor used by tests and the CLI."""
    cfg = EngineConfig(**kwargs)
    if stft is not None:
        cfg = replace(cfg, stft=stft)
    return cfg
