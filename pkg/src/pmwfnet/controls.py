"""Speech presence, distortion control and smoothing-factor laws.

Per frame the engine turns the reference-channel mask magnitude into a
speech presence probability (SPP), then derives the filter's distortion
weight beta and the covariance smoothing factors from it.  Each control has
several selectable modes matching the ablation grid:

    beta:  fixed(value) | freq (learned per-bin gain) | spp (gain * (1 - SPP))
    alpha: cum_mean (1/t running mean) | fixed(value) | freq (sigmoid of the
           learned per-bin logit) | spp (speech factor scaled by SPP, noise
           factor by 1 - SPP)

All functions are pure; the parameter block is immutable per stream.
"""

from dataclasses import dataclass

import numpy as np

BETA_MODES = ("fixed", "freq", "spp")
ALPHA_MODES = ("cum_mean", "fixed", "freq", "spp")


def sigmoid(x):
    """Logistic function; exp overflow saturates cleanly to 0."""
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-x))


@dataclass(frozen=True)
class ControlParams:
    p_a: np.ndarray            # (F,) SPP slope per bin
    p_b: np.ndarray            # (F,) SPP offset per bin
    beta0: np.ndarray          # (F,) distortion gain, >= 0
    alpha0_ss: np.ndarray      # (F,) speech smoothing logit
    alpha0_nn: np.ndarray      # (F,) noise smoothing logit
    beta_mode: str = "spp"
    beta_value: float = 1.0
    alpha_mode: str = "freq"
    alpha_value: float = 0.1

    def __post_init__(self):
        if self.beta_mode not in BETA_MODES:
            raise ValueError(f"unknown beta mode {self.beta_mode!r}")
        if self.alpha_mode not in ALPHA_MODES:
            raise ValueError(f"unknown alpha mode {self.alpha_mode!r}")
        if self.beta_mode == "fixed" and self.beta_value < 0:
            raise ValueError("fixed beta must be >= 0")
        if self.alpha_mode == "fixed" and not 0.0 < self.alpha_value < 1.0:
            raise ValueError("fixed alpha must lie in (0, 1)")
        if np.any(self.beta0 < 0):
            raise ValueError("beta0 must be clamped to >= 0 at load")


def estimate_spp(params: ControlParams, mask_ref_mag):
    """SPP per bin: sigmoid(p_a * |mask at reference channel| + p_b)."""
    return sigmoid(params.p_a * np.asarray(mask_ref_mag) + params.p_b)


def compute_beta(params: ControlParams, spp, frame_index):
    """Distortion weight per bin for the current frame; always >= 0."""
    if params.beta_mode == "fixed":
        return np.full(params.beta0.shape, float(params.beta_value))
    if params.beta_mode == "freq":
        return params.beta0.copy()
    return params.beta0 * (1.0 - np.asarray(spp))


def compute_alphas(params: ControlParams, spp, frame_index):
    """Smoothing factors (speech, noise) per bin; both in [0, 1].

    ``frame_index`` is 1-based; the cumulative-mean mode needs it to realize
    the exact running mean via alpha = 1/t.
    """
    shape = params.alpha0_ss.shape
    if params.alpha_mode == "cum_mean":
        if frame_index < 1:
            raise ValueError("cumulative mean needs frame_index >= 1")
        a = np.full(shape, 1.0 / frame_index)
        return a, a.copy()
    if params.alpha_mode == "fixed":
        a = np.full(shape, float(params.alpha_value))
        return a, a.copy()
    if params.alpha_mode == "freq":
        return sigmoid(params.alpha0_ss), sigmoid(params.alpha0_nn)
    spp = np.asarray(spp)
    return sigmoid(params.alpha0_ss) * spp, sigmoid(params.alpha0_nn) * (1.0 - spp)
