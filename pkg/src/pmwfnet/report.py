"""Complexity accounting and learned-parameter export.

Counting conventions (documented contract, asserted by the test suite):

* Parameters: every stored tensor element counts once (weights, biases,
  PReLU slopes, control vectors); the hyperparameter header does not.
* One real multiply-accumulate = 1 MAC.  Matrix/vector products count
  rows x cols MACs; additions and activations are free.
* Applying the real temporal mask to a complex channel costs 2 real MACs
  per element; the complex-by-complex separation product costs 4.
* The per-bin filter algebra is budgeted in complex multiply-accumulates,
  one MAC each: M^3 for the loaded-covariance inversion plus 2 M^3 for the
  matrix products, so 3 M^3 per bin per frame.
* Frame rate = sample_rate / hop (125 Hz at the default configuration).
"""

import csv
from dataclasses import dataclass

import numpy as np

from .controls import sigmoid
from .errors import IoFailure
from .masknet import ModelWeights
from .stft import StftConfig


@dataclass(frozen=True)
class ComplexityReport:
    params_by_part: dict
    macs_per_frame_by_part: dict
    frame_rate: float

    @property
    def params_total(self):
        return sum(self.params_by_part.values())

    @property
    def macs_per_frame_total(self):
        return sum(self.macs_per_frame_by_part.values())

    @property
    def mmacs_per_second(self):
        return self.macs_per_frame_total * self.frame_rate / 1e6


def complexity_report(weights: ModelWeights, stft: StftConfig = StftConfig()) -> ComplexityReport:
    """Analytic parameter and MAC counts for the configured architecture."""
    h = weights.hyper
    m, f, hs = h.mics, h.bins, h.split_hidden

    spatial_params = 0
    spatial_macs = 0
    for l in range(h.spatial_layers):
        c_in, c_out = h.spatial_channels(l)
        spatial_params += f * c_out * c_in + c_out
        spatial_macs += f * c_out * c_in

    gru_params = h.temporal_layers * h.splits * (2 * 3 * hs * hs + 3 * hs)
    gru_macs = h.temporal_layers * h.splits * (2 * 3 * hs * hs)

    params = {
        "spatial": spatial_params,
        "encoder": h.hidden * f + h.hidden,
        "gru": gru_params,
        "decoder": f * h.hidden + f,
        "controls": 5 * f,
    }
    macs = {
        "spatial": spatial_macs,
        "encoder": h.hidden * f,
        "gru": gru_macs,
        "decoder": f * h.hidden,
        "controls": 2 * f,
        "mask_combine": 2 * m * f,
        "separation": 4 * m * f,
        "filter_algebra": f * 3 * m**3,
    }
    return ComplexityReport(
        params_by_part=params,
        macs_per_frame_by_part=macs,
        frame_rate=stft.sample_rate / stft.hop,
    )


def format_report(report: ComplexityReport) -> str:
    lines = ["part            params      MACs/frame"]
    parts = sorted(set(report.params_by_part) | set(report.macs_per_frame_by_part))
    for part in parts:
        p = report.params_by_part.get(part, 0)
        c = report.macs_per_frame_by_part.get(part, 0)
        lines.append(f"{part:<15} {p:>9,}  {c:>14,}")
    lines.append(
        f"{'total':<15} {report.params_total:>9,}  {report.macs_per_frame_total:>14,}"
    )
    lines.append(f"frame rate      {report.frame_rate:.1f} Hz")
    lines.append(f"compute         {report.mmacs_per_second:.2f} MMAC/s")
    return "\n".join(lines)


def dump_params(weights: ModelWeights, path):
    """Write the learned per-frequency control curves as CSV.

    Columns: frequency_bin, alpha_ss, alpha_nn, beta0, p_a, p_b, with the
    smoothing logits already mapped through the sigmoid.
    """
    a_ss = sigmoid(weights.alpha0_ss)
    a_nn = sigmoid(weights.alpha0_nn)
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["frequency_bin", "alpha_ss", "alpha_nn", "beta0", "p_a", "p_b"])
            for w in range(weights.hyper.bins):
                writer.writerow(
                    [
                        w,
                        f"{a_ss[w]:.9g}",
                        f"{a_nn[w]:.9g}",
                        f"{weights.beta0[w]:.9g}",
                        f"{weights.p_a[w]:.9g}",
                        f"{weights.p_b[w]:.9g}",
                    ]
                )
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
