import numpy as np
import pytest

from pmwfnet.errors import SingularMatrix
from pmwfnet.linalg import (
    ABS_LOADING,
    batched_loaded_solve,
    batched_regularized_inverse,
    herm_outer,
    matmul,
    regularized_inverse,
    solve_loaded_fast,
)

from conftest import random_psd


def naive_matmul(a, b):
    """Triple-loop oracle, deliberately independent of numpy's matmul."""
    n = a.shape[0]
    out = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            acc = 0.0 + 0.0j
            for k in range(n):
                acc += a[i, k] * b[k, j]
            out[i, j] = acc
    return out


class TestHermOuter:
    def test_unit_example(self):
        v = np.array([1.0, 1.0j])
        expected = np.array([[1.0, -1.0j], [1.0j, 1.0]])
        assert np.array_equal(herm_outer(v), expected)

    def test_zero_vector(self):
        assert np.array_equal(herm_outer(np.zeros(2)), np.zeros((2, 2)))

    def test_trace_and_eigenvalues_match_eigen_oracle(self, rng):
        for _ in range(20):
            v = rng.standard_normal(5) + 1j * rng.standard_normal(5)
            m = herm_outer(v)
            norm_sq = float(np.vdot(v, v).real)
            assert np.trace(m).real == pytest.approx(norm_sq, rel=1e-12)
            # oracle: independent eigen decomposition
            eigs = np.linalg.eigvalsh(m)
            assert np.abs(eigs[:-1]).max() < 1e-12 * norm_sq
            assert eigs[-1] == pytest.approx(norm_sq, rel=1e-12)

    def test_exactly_hermitian(self, rng):
        for _ in range(50):
            v = rng.standard_normal(6) + 1j * rng.standard_normal(6)
            m = herm_outer(v)
            assert np.array_equal(m, m.conj().T)


class TestRegularizedInverse:
    def test_identity_no_loading(self):
        inv = regularized_inverse(np.eye(2, dtype=complex), 0.0)
        assert np.allclose(inv, np.eye(2), atol=1e-12)

    def test_diagonal(self):
        inv = regularized_inverse(np.diag([2.0, 4.0]).astype(complex), 0.0)
        assert np.allclose(inv, np.diag([0.5, 0.25]), atol=1e-12)

    def test_rank1_loaded_matches_dense_oracle(self, rng):
        v = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        m = herm_outer(v)
        delta = 1e-3
        inv = regularized_inverse(m, delta)
        load = delta * np.trace(m).real / 5 + ABS_LOADING
        oracle = np.linalg.inv(m + load * np.eye(5))
        rel = np.abs(inv - oracle).max() / np.abs(oracle).max()
        assert rel < 1e-10

    def test_inverse_identity_property(self, rng):
        for _ in range(20):
            m = random_psd(rng, 5) + 0.5 * np.eye(5)
            delta = 1e-3
            inv = regularized_inverse(m, delta)
            load = delta * np.trace(m).real / 5 + ABS_LOADING
            err = np.abs(inv @ (m + load * np.eye(5)) - np.eye(5)).max()
            assert err < 1e-9

    def test_singular_raises(self):
        with pytest.raises(SingularMatrix):
            # zero matrix with zero loading only gets the absolute floor,
            # which sits below the pivot threshold scaled by ... nothing:
            # force singularity with an exactly dependent pair of rows at
            # large scale so the relative threshold bites
            m = np.array([[1e20, 1e20], [1e20, 1e20]], dtype=complex)
            regularized_inverse(m, 0.0)

    def test_nan_input_flagged_invalid(self):
        m = np.full((3, 3), np.nan, dtype=complex)
        _, valid = batched_regularized_inverse(m[None], 0.0)
        assert not valid[0]

    def test_negative_loading_rejected(self):
        with pytest.raises(ValueError):
            regularized_inverse(np.eye(2, dtype=complex), -1.0)


class TestMatmul:
    def test_identity(self, rng):
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        assert np.allclose(matmul(np.eye(4, dtype=complex), a), a)

    def test_zero(self, rng):
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        assert np.array_equal(matmul(a, np.zeros((3, 3), dtype=complex)), np.zeros((3, 3)))

    def test_matches_naive_oracle(self, rng):
        a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        b = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        got = matmul(a, b)
        want = naive_matmul(a, b)
        assert np.abs(got - want).max() / np.abs(want).max() < 1e-12

    def test_associativity(self, rng):
        for _ in range(10):
            a, b, c = (
                rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
                for _ in range(3)
            )
            left = matmul(matmul(a, b), c)
            right = matmul(a, matmul(b, c))
            assert np.abs(left - right).max() / np.abs(left).max() < 1e-10

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            matmul(np.eye(2, dtype=complex), np.eye(3, dtype=complex))


class TestBatchedSolve:
    def test_matches_library_solver(self, rng):
        mats = np.stack([random_psd(rng, 5) + 0.1 * np.eye(5) for _ in range(64)])
        rhs = rng.standard_normal((64, 5, 5)) + 1j * rng.standard_normal((64, 5, 5))
        got, valid = batched_loaded_solve(mats, rhs, 1e-3)
        assert valid.all()
        load = 1e-3 * np.einsum("bii->b", mats).real / 5 + ABS_LOADING
        oracle = np.linalg.solve(mats + load[:, None, None] * np.eye(5), rhs)
        assert np.abs(got - oracle).max() / np.abs(oracle).max() < 1e-10

    def test_fast_path_matches_elimination(self, rng):
        mats = np.stack([random_psd(rng, 4) + 0.2 * np.eye(4) for _ in range(16)])
        rhs = rng.standard_normal((16, 4, 2)) + 1j * rng.standard_normal((16, 4, 2))
        slow, v1 = batched_loaded_solve(mats, rhs, 1e-2)
        fast, v2 = solve_loaded_fast(mats, rhs, 1e-2)
        assert v1.all() and v2.all()
        assert np.abs(slow - fast).max() / np.abs(slow).max() < 1e-10

    def test_mixed_validity(self, rng):
        good = random_psd(rng, 3) + np.eye(3)
        bad = np.full((3, 3), 1e20, dtype=complex)  # rank 1 at huge scale
        _, valid = batched_loaded_solve(
            np.stack([good, bad]), np.tile(np.eye(3, dtype=complex), (2, 1, 1)), 0.0
        )
        assert valid[0] and not valid[1]
