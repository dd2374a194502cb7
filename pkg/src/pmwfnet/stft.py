"""Streaming, causal analysis/synthesis transform.

Frames are 256 samples with a 128-sample shift at 16 kHz, giving 129
one-sided bins and one window (16 ms) of algorithmic latency.  A square-root
Hann window (periodic form) is applied on both the analysis and synthesis
side; its square satisfies the constant-overlap-add condition exactly at 50%
overlap, so a full analysis->synthesis round trip reproduces the input
delayed by ``window_len - hop`` samples.

Each stream direction is a small stateful object fed one hop of samples (or
one spectrum) per call; state never changes size after construction.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BinCountMismatch, ChannelMismatch


@dataclass(frozen=True)
class StftConfig:
    window_len: int = 256
    hop: int = 128
    n_bins: int = 129
    sample_rate: int = 16000

    def __post_init__(self):
        if self.n_bins != self.window_len // 2 + 1:
            raise ValueError("n_bins must equal window_len/2 + 1")
        if self.window_len % self.hop != 0:
            raise ValueError("hop must divide window_len")

    @property
    def latency_samples(self):
        return self.window_len - self.hop


def sqrt_hann(length):
    """Square root of the periodic Hann window (COLA at 50% overlap)."""
    return np.sqrt(0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(length) / length))


class StreamAnalyzer:
    """Per-channel sliding window analysis; one spectrum frame per hop."""

    def __init__(self, config: StftConfig, channels: int):
        self.config = config
        self.channels = channels
        self.window = sqrt_hann(config.window_len)
        self._buffer = np.zeros((channels, config.window_len))
        self.frame_index = 0

    def analyze_frame(self, hop_samples):
        """Shift in one hop of samples per channel, return the (C, F) spectrum."""
        hop_samples = np.asarray(hop_samples, dtype=np.float64)
        cfg = self.config
        if hop_samples.shape != (self.channels, cfg.hop):
            if hop_samples.ndim != 2 or hop_samples.shape[0] != self.channels:
                raise ChannelMismatch(
                    f"expected {self.channels} channels x {cfg.hop} samples, "
                    f"got {hop_samples.shape}"
                )
            raise ValueError(f"expected hop of {cfg.hop} samples, got {hop_samples.shape}")
        self._buffer[:, : cfg.window_len - cfg.hop] = self._buffer[:, cfg.hop :]
        self._buffer[:, cfg.window_len - cfg.hop :] = hop_samples
        self.frame_index += 1
        return np.fft.rfft(self._buffer * self.window, axis=1)


class StreamSynthesizer:
    """Single-channel inverse transform with overlap-add; one hop out per frame."""

    def __init__(self, config: StftConfig):
        self.config = config
        self.window = sqrt_hann(config.window_len)
        self._ola = np.zeros(config.window_len)
        self.frame_index = 0

    def synthesize_frame(self, spectrum):
        """Inverse-transform one one-sided spectrum, emit the next hop of samples.

        Bins 0 and F-1 are treated as real (Hermitian-consistent one-sided
        input is assumed).
        """
        spectrum = np.asarray(spectrum, dtype=np.complex128)
        cfg = self.config
        if spectrum.shape != (cfg.n_bins,):
            raise BinCountMismatch(
                f"expected {cfg.n_bins} bins, got shape {spectrum.shape}"
            )
        frame = np.fft.irfft(spectrum, n=cfg.window_len) * self.window
        self._ola += frame
        out = self._ola[: cfg.hop].copy()
        self._ola[: cfg.window_len - cfg.hop] = self._ola[cfg.hop :]
        self._ola[cfg.window_len - cfg.hop :] = 0.0
        self.frame_index += 1
        return out
