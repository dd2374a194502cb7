"""Recursive per-frequency tracking of speech and noise spatial covariances.

Each frequency bin carries one M x M Hermitian matrix per signal class,
updated by the convex recursion

    Phi[t] = (1 - alpha) * Phi[t-1] + alpha * (v v^H)

with the class's own smoothing factor.  Hermitian symmetry is re-enforced
after every step so rounding drift cannot accumulate over long streams.

Speech and noise stacks live in one (2, F, M, M) array and are updated by a
single vectorized pass; ``speech`` and ``noise`` are views into it.
"""

import numpy as np


class CovarianceState:
    """Speech/noise covariance stacks, shape (F, M, M) each, plus a frame count."""

    def __init__(self, both, frame_count=0):
        self._both = both  # (2, F, M, M); index 0 speech, 1 noise
        self.frame_count = frame_count

    @property
    def speech(self):
        return self._both[0]

    @property
    def noise(self):
        return self._both[1]

    @property
    def bins(self):
        return self._both.shape[1]

    @property
    def mics(self):
        return self._both.shape[2]


def init_state(mics, bins, epsilon) -> CovarianceState:
    """Fresh state: epsilon * I at every frequency, frame count zero.

    The small positive epsilon keeps the very first inversions
    well-conditioned without biasing the steady state.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    eye = epsilon * np.eye(mics, dtype=np.complex128)
    return CovarianceState(np.tile(eye, (2, bins, 1, 1)))


def update(state: CovarianceState, speech_est, noise_est, alpha_ss, alpha_nn):
    """Fold one frame of per-bin signal estimates into the running covariances.

    ``speech_est`` and ``noise_est`` are (M, F) complex frames; the alphas
    are per-bin vectors in [0, 1].  Mutates and returns ``state``.
    """
    vecs = np.stack([np.asarray(speech_est).T, np.asarray(noise_est).T])  # (2, F, M)
    alphas = np.stack([np.asarray(alpha_ss), np.asarray(alpha_nn)])

    # alpha * (v v^H) == (sqrt(alpha) v)(sqrt(alpha) v)^H, which keeps the
    # rank-1 term exactly Hermitian and saves one full-size multiply
    scaled = vecs * np.sqrt(alphas)[:, :, None]
    both = state._both
    both *= (1.0 - alphas)[:, :, None, None]
    both += np.einsum("cfi,cfj->cfij", scaled, scaled.conj())

    # re-enforce Hermitian symmetry each step
    both += both.conj().transpose(0, 1, 3, 2)
    both *= 0.5

    state.frame_count += 1
    return state
