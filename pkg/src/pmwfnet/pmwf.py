"""Parameterized multichannel Wiener filter: weight computation and application.

Per bin, with speech and noise covariances Phi_ss and Phi_nn, the filter is

    gamma = inv(Phi_nn + load * I) @ Phi_ss
    h     = gamma[:, ref] / (beta + Re(trace(gamma)))

beta = 0 gives the distortionless (MVDR) solution, beta = 1 the classical
multichannel Wiener filter, larger beta trades speech distortion for more
suppression.  The trace of a product of Hermitian PSD matrices has
nonnegative real part; the imaginary rounding residue is discarded so the
denominator stays real.

Degenerate bins (singular loaded covariance, or |denominator| below
threshold) are flagged invalid; the bank keeps the previous valid filter
there (zero before any valid frame) for silent, artifact-free startup.
"""

import numpy as np

from .errors import DegenerateDenominator, SingularMatrix
from .linalg import batched_regularized_inverse, solve_loaded_fast

DENOM_FLOOR = 1e-12


class FilterBank:
    """Per-bin filter vectors plus validity flags; holds last valid filter."""

    def __init__(self, bins, mics):
        self.h = np.zeros((bins, mics), dtype=np.complex128)
        self.valid = np.zeros(bins, dtype=bool)


def compute_filter_bank(speech_cov, noise_cov, beta, ref_channel=0, loading=1e-3):
    """Vectorized filter computation over all bins.

    Returns ``(h, valid)``: (F, M) filters and a validity mask.  Invalid
    slots contain garbage and must be masked by the caller.
    """
    beta = np.asarray(beta, dtype=np.float64)
    gamma, valid = solve_loaded_fast(noise_cov, speech_cov, loading)
    denom = beta + np.einsum("fii->f", gamma).real
    degenerate = np.abs(denom) < DENOM_FLOOR
    valid = valid & ~degenerate
    denom = np.where(degenerate, 1.0, denom)
    return gamma[:, :, ref_channel] / denom[:, None], valid


def compute_filter(noise_cov, speech_cov, beta, ref_channel=0, loading=1e-3):
    """Single-bin filter vector; raises instead of flagging.

    Raises SingularMatrix if the loaded noise covariance cannot be inverted
    and DegenerateDenominator if beta + Re(trace(gamma)) collapses; in both
    cases the caller should reuse its previous filter.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0")
    m = np.asarray(noise_cov).shape[0]
    if not 0 <= ref_channel < m:
        raise ValueError(f"ref_channel {ref_channel} out of range for M={m}")
    h, valid = compute_filter_bank(
        np.asarray(speech_cov, dtype=np.complex128)[None],
        np.asarray(noise_cov, dtype=np.complex128)[None],
        np.array([beta], dtype=np.float64),
        ref_channel=ref_channel,
        loading=loading,
    )
    if not valid[0]:
        # distinguish the two failure modes for the caller
        _, inv_ok = batched_regularized_inverse(
            np.asarray(noise_cov, dtype=np.complex128)[None], loading
        )
        if not inv_ok[0]:
            raise SingularMatrix("loaded noise covariance is numerically singular")
        raise DegenerateDenominator("beta + Re(trace(gamma)) below threshold")
    return h[0]


def apply_filter(h, y):
    """Filter output h^H y for one bin (conjugated inner product)."""
    return np.vdot(h, y)


def apply_filter_bank(h, frame):
    """Apply per-bin filters (F, M) to an (M, F) frame; returns (F,) spectrum."""
    return np.einsum("fm,mf->f", h.conj(), frame)
