import numpy as np

from pmwfnet.covariance import init_state, update

from conftest import random_frame


class TestInit:
    def test_epsilon_identity(self):
        state = init_state(2, 4, 1e-6)
        for mats in (state.speech, state.noise):
            assert mats.shape == (4, 2, 2)
            assert np.array_equal(mats[0], 1e-6 * np.eye(2))
        assert state.frame_count == 0

    def test_trace(self):
        state = init_state(5, 3, 1e-6)
        assert np.trace(state.noise[0]).real == 5 * 1e-6

    def test_first_update_with_alpha_one_replaces_init(self, rng):
        state = init_state(3, 2, 1e-6)
        s = random_frame(rng, 3, 2)
        n = random_frame(rng, 3, 2)
        update(state, s, n, np.ones(2), np.ones(2))
        for w in range(2):
            outer = np.outer(s[:, w], s[:, w].conj())
            assert np.abs(state.speech[w] - outer).max() < 1e-12 * np.abs(outer).max()
        assert state.frame_count == 1


class TestUpdate:
    def test_alpha_zero_keeps_state(self, rng):
        state = init_state(3, 4, 1e-3)
        before_s = state.speech.copy()
        before_n = state.noise.copy()
        update(state, random_frame(rng, 3, 4), random_frame(rng, 3, 4), np.zeros(4), np.zeros(4))
        assert np.array_equal(state.speech, before_s)
        assert np.array_equal(state.noise, before_n)
        assert state.frame_count == 1

    def test_scalar_hand_recursion(self):
        # M=1: 0.5 * 1 + 0.5 * |2|^2 = 2.5
        state = init_state(1, 1, 1.0)
        update(
            state,
            np.array([[2.0 + 0.0j]]),
            np.array([[0.0 + 0.0j]]),
            np.array([0.5]),
            np.array([0.5]),
        )
        assert abs(state.speech[0, 0, 0] - 2.5) < 1e-12

    def test_hermitian_and_psd_preserved_over_many_updates(self, rng):
        state = init_state(4, 8, 1e-6)
        for _ in range(500):
            update(
                state,
                random_frame(rng, 4, 8),
                random_frame(rng, 4, 8),
                rng.uniform(0, 1, 8),
                rng.uniform(0, 1, 8),
            )
        for mats in (state.speech, state.noise):
            herm_err = np.abs(mats - mats.conj().transpose(0, 2, 1)).max()
            assert herm_err < 1e-10
            for w in range(8):
                eigs = np.linalg.eigvalsh(mats[w])
                assert eigs.min() >= -1e-10 * np.trace(mats[w]).real

    def test_cumulative_mean_matches_direct_average(self, rng):
        # alpha = 1/t reproduces the exact running mean of outer products
        frames = 200
        state = init_state(3, 2, 1e-6)
        outers = []
        for t in range(1, frames + 1):
            s = random_frame(rng, 3, 2)
            outers.append(
                np.stack([np.outer(s[:, w], s[:, w].conj()) for w in range(2)])
            )
            alpha = np.full(2, 1.0 / t)
            update(state, s, np.zeros((3, 2), dtype=complex), alpha, alpha)
        direct = np.mean(outers, axis=0)
        rel = np.abs(state.speech - direct).max() / np.abs(direct).max()
        assert rel < 1e-9

    def test_stationary_convergence_monte_carlo(self, rng):
        # expectation check: averaging the steady state of many independent
        # streams must approach the true covariance
        m, streams, frames, alpha = 4, 60, 400, 0.1
        chol = np.linalg.cholesky(
            np.array(
                [
                    [2.0, 0.5 + 0.2j, 0.1, 0.0],
                    [0.5 - 0.2j, 1.5, 0.3j, 0.0],
                    [0.1, -0.3j, 1.0, 0.2],
                    [0.0, 0.0, 0.2, 0.8],
                ]
            )
        )
        sigma = chol @ chol.conj().T
        acc = np.zeros((m, m), dtype=complex)
        a = np.array([alpha])
        for _ in range(streams):
            state = init_state(m, 1, 1e-6)
            for _ in range(frames):
                v = chol @ (
                    (rng.standard_normal(m) + 1j * rng.standard_normal(m)) / np.sqrt(2)
                )
                update(state, v[:, None], v[:, None], a, a)
            acc += state.noise[0]
        mean_phi = acc / streams
        rel = np.linalg.norm(mean_phi - sigma) / np.linalg.norm(sigma)
        assert rel < 0.10
