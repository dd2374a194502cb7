"""Forward-pass inference of the mask network.

The network maps one multichannel spectrum frame to a multichannel complex
mask.  It has two halves:

* a spatial stack: per-frequency matrix multiplies over the real/imag
  channel features (channel 2k holds Re of mic k, channel 2k+1 holds Im),
  each followed by a per-channel parametric ReLU.  All layers keep the 2M
  feature channels except the last, which emits one extra channel used as
  the temporal input.
* a temporal stack: the extra channel (length F) is encoded to H features,
  run through causal split-GRU layers, and decoded back to a real per-bin
  mask.  A split-GRU divides its input into R contiguous segments, advances
  one small GRU per segment, then interleaves the concatenated outputs with
  stride R so every downstream segment sees features from every upstream
  GRU.

The real mask multiplies each complex spatial channel to form the final
mask.  No output squashing is applied; the downstream filter is robust to
mask scale.

Conventions fixed for fixture compatibility (mirrored by the reference
generator under refgen/):

* GRU gate rows in ``w_ih``/``w_hh``/``bias`` are ordered reset, update,
  candidate; one combined bias per gate.
* candidate = tanh(w_ih_n @ x + bias_n + reset * (w_hh_n @ h)),
  new_h = (1 - update) * candidate + update * h.
* interleave: concatenated output feature k moves to
  (k mod R) * (H/R) + floor(k / R).
"""

from dataclasses import dataclass, field

import numpy as np

from .controls import sigmoid
from .errors import ChannelMismatch, MissingTensor, ShapeMismatch
from .npw1 import read_container, write_container

HYPERPARAMS_NAME = "hyperparams"
CONTROL_NAMES = ("p_a", "p_b", "beta0", "alpha0_ss", "alpha0_nn")


@dataclass(frozen=True)
class Hyperparams:
    mics: int = 5
    bins: int = 129
    hidden: int = 96
    splits: int = 2
    spatial_layers: int = 4
    temporal_layers: int = 3

    def __post_init__(self):
        for name in ("mics", "bins", "hidden", "splits", "spatial_layers", "temporal_layers"):
            if getattr(self, name) < 1:
                raise ShapeMismatch(f"hyperparameter {name} must be >= 1")
        if self.hidden % self.splits != 0:
            raise ShapeMismatch(
                f"hidden size {self.hidden} not divisible by split count {self.splits}"
            )

    @property
    def split_hidden(self):
        return self.hidden // self.splits

    def spatial_channels(self, layer):
        """(in, out) feature channels of one spatial layer."""
        c = 2 * self.mics
        return c, c + 1 if layer == self.spatial_layers - 1 else c


@dataclass
class ModelWeights:
    hyper: Hyperparams
    spatial_w: list = field(default_factory=list)      # per layer (F, C_out, C_in)
    spatial_slope: list = field(default_factory=list)  # per layer (C_out,)
    enc_w: np.ndarray = None                           # (H, F)
    enc_b: np.ndarray = None                           # (H,)
    gru_w_ih: list = field(default_factory=list)       # per layer (R, 3H', H')
    gru_w_hh: list = field(default_factory=list)       # per layer (R, 3H', H')
    gru_bias: list = field(default_factory=list)       # per layer (R, 3H')
    dec_w: np.ndarray = None                           # (F, H)
    dec_b: np.ndarray = None                           # (F,)
    p_a: np.ndarray = None                             # (F,) each
    p_b: np.ndarray = None
    beta0: np.ndarray = None
    alpha0_ss: np.ndarray = None
    alpha0_nn: np.ndarray = None


class RecurrentState:
    """Per-stream hidden vectors of every split GRU; zeros at stream start."""

    def __init__(self, hyper: Hyperparams):
        self.hyper = hyper
        self.hidden = np.zeros(
            (hyper.temporal_layers, hyper.splits, hyper.split_hidden)
        )

    def reset(self):
        self.hidden[:] = 0.0


def required_tensor_shapes(hyper: Hyperparams) -> dict:
    """Every tensor name the container must carry, with its exact shape."""
    f, h = hyper.bins, hyper.hidden
    hs = hyper.split_hidden
    shapes = {}
    for l in range(hyper.spatial_layers):
        c_in, c_out = hyper.spatial_channels(l)
        shapes[f"spatial.{l}.weight"] = (f, c_out, c_in)
        shapes[f"spatial.{l}.prelu"] = (c_out,)
    shapes["encoder.weight"] = (h, f)
    shapes["encoder.bias"] = (h,)
    for l in range(hyper.temporal_layers):
        for r in range(hyper.splits):
            shapes[f"gru.{l}.split{r}.w_ih"] = (3 * hs, hs)
            shapes[f"gru.{l}.split{r}.w_hh"] = (3 * hs, hs)
            shapes[f"gru.{l}.split{r}.bias"] = (3 * hs,)
    shapes["decoder.weight"] = (f, h)
    shapes["decoder.bias"] = (f,)
    for name in CONTROL_NAMES:
        shapes[f"controls.{name}"] = (f,)
    return shapes


def _hyper_from_tensor(arr) -> Hyperparams:
    if arr.shape != (6,):
        raise ShapeMismatch(f"{HYPERPARAMS_NAME} must hold 6 values, got {arr.shape}")
    vals = [int(round(float(v))) for v in arr]
    return Hyperparams(*vals)


def load_weights(data: bytes) -> ModelWeights:
    """Parse an NPW1 container into float64 model weights.

    The distortion gain vector is clamped to >= 0 here so the filter
    denominator can never be pushed negative.
    """
    tensors = read_container(data)
    if HYPERPARAMS_NAME not in tensors:
        raise MissingTensor(HYPERPARAMS_NAME)
    hyper = _hyper_from_tensor(tensors[HYPERPARAMS_NAME])

    expected = required_tensor_shapes(hyper)
    for name, shape in expected.items():
        if name not in tensors:
            raise MissingTensor(name)
        if tensors[name].shape != shape:
            raise ShapeMismatch(
                f"{name}: expected {shape}, got {tensors[name].shape}"
            )

    def f64(name):
        return tensors[name].astype(np.float64)

    w = ModelWeights(hyper=hyper)
    for l in range(hyper.spatial_layers):
        w.spatial_w.append(f64(f"spatial.{l}.weight"))
        w.spatial_slope.append(f64(f"spatial.{l}.prelu"))
    w.enc_w = f64("encoder.weight")
    w.enc_b = f64("encoder.bias")
    for l in range(hyper.temporal_layers):
        w.gru_w_ih.append(
            np.stack([f64(f"gru.{l}.split{r}.w_ih") for r in range(hyper.splits)])
        )
        w.gru_w_hh.append(
            np.stack([f64(f"gru.{l}.split{r}.w_hh") for r in range(hyper.splits)])
        )
        w.gru_bias.append(
            np.stack([f64(f"gru.{l}.split{r}.bias") for r in range(hyper.splits)])
        )
    w.dec_w = f64("decoder.weight")
    w.dec_b = f64("decoder.bias")
    w.p_a = f64("controls.p_a")
    w.p_b = f64("controls.p_b")
    w.beta0 = np.maximum(f64("controls.beta0"), 0.0)
    w.alpha0_ss = f64("controls.alpha0_ss")
    w.alpha0_nn = f64("controls.alpha0_nn")
    return w


def load_weights_file(path) -> ModelWeights:
    with open(path, "rb") as fh:
        return load_weights(fh.read())


def save_weights(w: ModelWeights) -> bytes:
    """Serialize model weights back into NPW1 container bytes.

    Note: the stored distortion gains are the in-memory (clamped) values.
    """
    h = w.hyper
    tensors = {
        HYPERPARAMS_NAME: np.array(
            [h.mics, h.bins, h.hidden, h.splits, h.spatial_layers, h.temporal_layers],
            dtype=np.float32,
        )
    }
    for l in range(h.spatial_layers):
        tensors[f"spatial.{l}.weight"] = w.spatial_w[l]
        tensors[f"spatial.{l}.prelu"] = w.spatial_slope[l]
    tensors["encoder.weight"] = w.enc_w
    tensors["encoder.bias"] = w.enc_b
    for l in range(h.temporal_layers):
        for r in range(h.splits):
            tensors[f"gru.{l}.split{r}.w_ih"] = w.gru_w_ih[l][r]
            tensors[f"gru.{l}.split{r}.w_hh"] = w.gru_w_hh[l][r]
            tensors[f"gru.{l}.split{r}.bias"] = w.gru_bias[l][r]
    tensors["decoder.weight"] = w.dec_w
    tensors["decoder.bias"] = w.dec_b
    tensors["controls.p_a"] = w.p_a
    tensors["controls.p_b"] = w.p_b
    tensors["controls.beta0"] = w.beta0
    tensors["controls.alpha0_ss"] = w.alpha0_ss
    tensors["controls.alpha0_nn"] = w.alpha0_nn
    return write_container(tensors)


def spatial_forward(w: ModelWeights, frame):
    """Run the spatial stack on one (M, F) complex frame.

    Returns ``(spatial_out, temporal_in)`` with shapes (2M, F) and (F,).
    """
    frame = np.asarray(frame)
    m = w.hyper.mics
    if frame.shape[0] != m:
        raise ChannelMismatch(f"expected {m} channels, got {frame.shape[0]}")
    feats = np.empty((w.hyper.bins, 2 * m))
    feats[:, 0::2] = frame.real.T
    feats[:, 1::2] = frame.imag.T
    for weight, slope in zip(w.spatial_w, w.spatial_slope):
        feats = np.einsum("fij,fj->fi", weight, feats)
        np.copyto(feats, feats * slope, where=feats < 0.0)  # parametric ReLU
    return feats[:, : 2 * m].T.copy(), feats[:, 2 * m].copy()


def split_gru_step(w_ih, w_hh, bias, state, x):
    """Advance one split-GRU layer by a single step.

    ``state`` is (R, H') and ``x`` is the flat (H,) layer input.  Returns
    ``(new_state, output)`` where output is the stride-R interleave of the
    concatenated per-split hidden vectors.
    """
    splits, hs = state.shape
    xs = np.ascontiguousarray(x).reshape(splits, hs)
    gx = np.einsum("rij,rj->ri", w_ih, xs) + bias
    gh = np.einsum("rij,rj->ri", w_hh, state)
    gates = sigmoid(gx[:, : 2 * hs] + gh[:, : 2 * hs])  # reset | update in one pass
    reset, update = gates[:, :hs], gates[:, hs:]
    cand = np.tanh(gx[:, 2 * hs :] + reset * gh[:, 2 * hs :])
    new_state = (1.0 - update) * cand + update * state
    # concatenated feature k moves to (k mod R)*(H/R) + floor(k/R): reading
    # the concatenation with stride R, realized as a reshape-transpose
    return new_state, new_state.reshape(hs, splits).T.reshape(-1)


def mask_forward(w: ModelWeights, state: RecurrentState, frame):
    """Full forward pass: one (M, F) complex frame -> (M, F) complex mask.

    Updates ``state`` in place and also returns it.
    """
    spatial_out, temporal_in = spatial_forward(w, frame)
    feats = w.enc_w @ temporal_in + w.enc_b
    for l in range(w.hyper.temporal_layers):
        new_h, feats = split_gru_step(
            w.gru_w_ih[l], w.gru_w_hh[l], w.gru_bias[l], state.hidden[l], feats
        )
        state.hidden[l] = new_h
    real_mask = w.dec_w @ feats + w.dec_b
    complex_spatial = spatial_out[0::2] + 1j * spatial_out[1::2]
    return real_mask[None, :] * complex_spatial, state
