"""Dense complex matrix kernels for the per-bin beamformer algebra.

Matrices are plain numpy complex128 arrays of size M x M with M small
(microphone counts, typically 5, at most ~8).  Batched variants carry a
leading axis so the engine can run one vectorized elimination across all
frequency bins of a frame instead of a Python loop.

All functions are pure; nothing here holds state.
"""

import numpy as np

from .errors import SingularMatrix

# Absolute floor added on top of the relative diagonal loading so an all-zero
# matrix still becomes invertible.
ABS_LOADING = 1e-12

# A pivot below PIVOT_RTOL * (largest initial row norm) marks the matrix as
# numerically singular.
PIVOT_RTOL = 1e-14


def herm_outer(v):
    """Rank-1 Hermitian outer product v v^H of a length-M complex vector.

    Assembled from real outer products so the result is exactly Hermitian;
    a fused complex multiply would leave ~1 ulp of asymmetry, including a
    nonzero imaginary residue on the diagonal.
    """
    v = np.asarray(v, dtype=np.complex128)
    re, im = v.real, v.imag
    real_part = np.outer(re, re) + np.outer(im, im)
    imag_part = np.outer(im, re) - np.outer(re, im)
    return real_part + 1j * imag_part


def matmul(a, b):
    """Product of two equal-size square complex matrices."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected equal square shapes, got {a.shape} and {b.shape}")
    return a @ b


def batched_loaded_solve(mats, rhs, loading):
    """Solve (m + load*I) X = rhs for a batch of Hermitian matrices.

    The load added to the diagonal is ``loading * trace(m)/M + ABS_LOADING``,
    which keeps the regularization scale-invariant.  The solver is
    Gauss-Jordan elimination with partial pivoting, vectorized over the batch
    axis; pivot magnitudes are compared against
    ``PIVOT_RTOL * max initial row norm`` of the loaded matrix.

    Parameters
    ----------
    mats : array (B, M, M) complex
    rhs : array (B, M, K) complex
    loading : float >= 0

    Returns
    -------
    (x, valid) : ((B, M, K) complex, (B,) bool)
        ``valid[b]`` is False when elimination met a pivot below the
        singularity threshold; that solution slot must not be used.
    """
    a = np.asarray(mats, dtype=np.complex128)
    rhs = np.asarray(rhs, dtype=np.complex128)
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ValueError(f"expected (B, M, M), got {a.shape}")
    if rhs.ndim != 3 or rhs.shape[:2] != a.shape[:2]:
        raise ValueError(f"rhs shape {rhs.shape} does not match {a.shape}")
    if loading < 0:
        raise ValueError("loading must be nonnegative")
    nb, m = a.shape[0], a.shape[1]
    width = m + rhs.shape[2]

    # batch-last layout: elementwise work runs over contiguous batch lanes
    aug = np.empty((m, width, nb), dtype=np.complex128)
    aug[:, :m, :] = a.transpose(1, 2, 0)
    aug[:, m:, :] = rhs.transpose(1, 2, 0)
    load = loading * (np.einsum("bii->b", a).real / m) + ABS_LOADING
    diag = np.arange(m)
    aug[diag, diag, :] += load[None, :]

    # squared magnitudes everywhere: pivot choice and threshold compare are
    # monotone in |.|, so the square root is never needed
    row_norms_sq = (aug[:, :m, :].real ** 2 + aug[:, :m, :].imag ** 2).sum(axis=1)
    threshold_sq = PIVOT_RTOL**2 * row_norms_sq.max(axis=0)

    valid = np.ones(nb, dtype=bool)
    for k in range(m):
        col = aug[k:, k, :]
        mag_sq = col.real**2 + col.imag**2
        pivot_row = mag_sq.argmax(axis=0) + k
        moved = np.nonzero(pivot_row != k)[0]
        if moved.size:
            rows = pivot_row[moved]
            tmp = aug[rows, :, moved].copy()
            aug[rows, :, moved] = aug[k, :, moved]
            aug[k, :, moved] = tmp

        pivot = aug[k, k, :]
        pivot_sq = pivot.real**2 + pivot.imag**2
        # written so non-finite pivots also land in `bad`
        bad = ~(pivot_sq >= threshold_sq)
        if bad.any():
            valid &= ~bad
            pivot = np.where(bad, 1.0, pivot)
        # scale row k, then clear column k from every other row; columns
        # left of k are already reduced and never read again, so skip them
        aug[k, k + 1 :, :] *= (1.0 / pivot)[None, :]
        factors = aug[:, k, :].copy()
        factors[k, :] = 0.0
        aug[:, k + 1 :, :] -= factors[:, None, :] * aug[k, None, k + 1 :, :]

    return np.ascontiguousarray(aug[:, m:, :].transpose(2, 0, 1)), valid


def solve_loaded_fast(mats, rhs, loading):
    """Loaded solve tuned for the per-frame hot path.

    Same contract as ``batched_loaded_solve``.  With positive loading the
    loaded matrix has condition number bounded by ~M/loading, so the pivot
    threshold can never trip and the library's pivoted LU factorization
    (one batched call) computes the identical solve much faster.  Zero
    loading, exact singularity, or a non-finite result fall back to the
    hand-rolled elimination, which carries the per-batch validity flags.
    """
    if loading <= 0.0:
        return batched_loaded_solve(mats, rhs, loading)
    a = np.asarray(mats, dtype=np.complex128)
    nb, m = a.shape[0], a.shape[1]
    load = loading * (np.einsum("bii->b", a).real / m) + ABS_LOADING
    loaded = a + load[:, None, None] * np.eye(m, dtype=np.complex128)
    try:
        x = np.linalg.solve(loaded, np.asarray(rhs, dtype=np.complex128))
    except np.linalg.LinAlgError:
        return batched_loaded_solve(mats, rhs, loading)
    if not np.isfinite(x.reshape(nb, -1).sum(axis=1)).all():
        return batched_loaded_solve(mats, rhs, loading)
    return x, np.ones(nb, dtype=bool)


def batched_regularized_inverse(mats, loading):
    """Invert a batch of Hermitian matrices after relative diagonal loading.

    Returns ``(inverses, valid)``; see ``batched_loaded_solve``.
    """
    mats = np.asarray(mats, dtype=np.complex128)
    nb, m = mats.shape[0], mats.shape[1]
    eye = np.broadcast_to(np.eye(m, dtype=np.complex128), (nb, m, m))
    return batched_loaded_solve(mats, eye, loading)


def regularized_inverse(mat, loading):
    """Inverse of one Hermitian matrix after relative diagonal loading.

    Raises SingularMatrix when the loaded matrix is still numerically
    singular, signalling a degenerate covariance the caller must skip.
    """
    mat = np.asarray(mat, dtype=np.complex128)
    inv, valid = batched_regularized_inverse(mat[None], loading)
    if not valid[0]:
        raise SingularMatrix(
            f"matrix of dim {mat.shape[0]} is numerically singular after loading {loading}"
        )
    return inv[0]
