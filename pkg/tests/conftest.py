"""Shared helpers: deterministic weight builders and fixture paths."""

import os

import numpy as np
import pytest

from pmwfnet.masknet import Hyperparams, ModelWeights

FIXTURES_DIR = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture_path(*parts):
    return os.path.join(FIXTURES_DIR, *parts)


def random_weights(rng, hyper=None, scale=0.1):
    """Uniform random weights, the same distribution the fixture generator uses."""
    hyper = hyper or Hyperparams()
    u = lambda *shape: rng.uniform(-scale, scale, shape)
    w = ModelWeights(hyper=hyper)
    for l in range(hyper.spatial_layers):
        c_in, c_out = hyper.spatial_channels(l)
        w.spatial_w.append(u(hyper.bins, c_out, c_in))
        w.spatial_slope.append(u(c_out))
    w.enc_w = u(hyper.hidden, hyper.bins)
    w.enc_b = u(hyper.hidden)
    hs = hyper.split_hidden
    for l in range(hyper.temporal_layers):
        w.gru_w_ih.append(u(hyper.splits, 3 * hs, hs))
        w.gru_w_hh.append(u(hyper.splits, 3 * hs, hs))
        w.gru_bias.append(u(hyper.splits, 3 * hs))
    w.dec_w = u(hyper.bins, hyper.hidden)
    w.dec_b = u(hyper.bins)
    w.p_a = u(hyper.bins)
    w.p_b = u(hyper.bins)
    w.beta0 = np.abs(u(hyper.bins))
    w.alpha0_ss = u(hyper.bins)
    w.alpha0_nn = u(hyper.bins)
    return w


def zero_weights(hyper=None):
    """All-zero (biasless) weights; useful for zero-propagation checks."""
    hyper = hyper or Hyperparams()
    w = ModelWeights(hyper=hyper)
    for l in range(hyper.spatial_layers):
        c_in, c_out = hyper.spatial_channels(l)
        w.spatial_w.append(np.zeros((hyper.bins, c_out, c_in)))
        w.spatial_slope.append(np.zeros(c_out))
    w.enc_w = np.zeros((hyper.hidden, hyper.bins))
    w.enc_b = np.zeros(hyper.hidden)
    hs = hyper.split_hidden
    for l in range(hyper.temporal_layers):
        w.gru_w_ih.append(np.zeros((hyper.splits, 3 * hs, hs)))
        w.gru_w_hh.append(np.zeros((hyper.splits, 3 * hs, hs)))
        w.gru_bias.append(np.zeros((hyper.splits, 3 * hs)))
    w.dec_w = np.zeros((hyper.bins, hyper.hidden))
    w.dec_b = np.zeros(hyper.bins)
    w.p_a = np.zeros(hyper.bins)
    w.p_b = np.zeros(hyper.bins)
    w.beta0 = np.zeros(hyper.bins)
    w.alpha0_ss = np.zeros(hyper.bins)
    w.alpha0_nn = np.zeros(hyper.bins)
    return w


def random_frame(rng, mics, bins, scale=1.0):
    return scale * (
        rng.standard_normal((mics, bins)) + 1j * rng.standard_normal((mics, bins))
    )


def random_psd(rng, dim, rank=None):
    """Random Hermitian PSD matrix of the given (full by default) rank."""
    rank = rank or dim
    a = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    return a @ a.conj().T


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
