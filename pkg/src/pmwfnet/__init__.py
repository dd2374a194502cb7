"""pmwfnet: streaming multichannel speech enhancement.

A mask-estimating network drives a parameterized multichannel Wiener filter:
per frame, the network's complex multichannel mask splits the mixture into
speech and noise estimates, recursive smoothing tracks their spatial
covariances, and learned per-bin controls set the filter's
distortion/suppression trade-off and adaptation speed.
"""

from .covariance import CovarianceState, init_state
from .engine import EngineConfig, StreamEngine, oracle_mask, separate
from .masknet import (
    Hyperparams,
    ModelWeights,
    RecurrentState,
    load_weights,
    load_weights_file,
    mask_forward,
    save_weights,
)
from .metrics import si_sdr, snr
from .pmwf import FilterBank, apply_filter, compute_filter
from .report import complexity_report, dump_params
from .stft import StftConfig, StreamAnalyzer, StreamSynthesizer
from .wavio import AudioBuffer, read_wav, write_wav

__version__ = "0.1.0"

__all__ = [
    "AudioBuffer",
    "CovarianceState",
    "EngineConfig",
    "FilterBank",
    "Hyperparams",
    "ModelWeights",
    "RecurrentState",
    "StftConfig",
    "StreamAnalyzer",
    "StreamEngine",
    "StreamSynthesizer",
    "apply_filter",
    "complexity_report",
    "compute_filter",
    "dump_params",
    "init_state",
    "load_weights",
    "load_weights_file",
    "mask_forward",
    "oracle_mask",
    "read_wav",
    "save_weights",
    "separate",
    "si_sdr",
    "snr",
    "write_wav",
]
