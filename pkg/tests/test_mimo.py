import math

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import rayleigh, seeds
from steersim.errors import (
    DegenerateChannelError,
    DimensionError,
    InfeasiblePowerError,
    NormalizationError,
    SingularChannelError,
)
from steersim.mimo import (
    NoiseModel,
    TransmitIntent,
    as_channel,
    assemble_rx,
    decompose_against,
    left_singular_basis,
    min_norm_solve,
    sample_rayleigh,
    shannon_se,
    svd_beamform,
)


class TestSampling:
    def test_same_seed_same_matrix(self):
        a = sample_rayleigh(np.random.default_rng(7), 2, 2)
        b = sample_rayleigh(np.random.default_rng(7), 2, 2)
        assert np.array_equal(a, b)

    def test_unit_variance(self):
        h = sample_rayleigh(np.random.default_rng(1), 1, 100_000)
        assert abs(np.mean(np.abs(h) ** 2) - 1.0) < 0.02
        # real and imaginary parts each carry half the power
        assert abs(np.var(h.real) - 0.5) < 0.01
        assert abs(np.var(h.imag) - 0.5) < 0.01
        assert abs(np.mean(h)) < 0.01

    def test_row_channel_for_zfbf(self):
        assert sample_rayleigh(np.random.default_rng(0), 1, 2).shape == (1, 2)

    @pytest.mark.parametrize("n_r,n_t", [(0, 2), (3, 2), (2.0, 2)])
    def test_bad_dimensions(self, n_r, n_t):
        with pytest.raises(DimensionError):
            sample_rayleigh(np.random.default_rng(0), n_r, n_t)

    def test_channel_validation(self):
        with pytest.raises(DimensionError):
            as_channel(np.ones(3))
        with pytest.raises(DimensionError):
            as_channel([[1, np.nan], [0, 1]])
        with pytest.raises(DimensionError):
            as_channel([[1, 2]], allow_single_rx=False)


class TestBeamform:
    def test_identity(self):
        bf = svd_beamform(np.eye(2))
        assert np.allclose(bf.precoder, [1, 0]) and np.allclose(bf.filter, [1, 0])
        assert bf.gain == pytest.approx(1.0)

    def test_diagonal(self):
        bf = svd_beamform(np.diag([3.0, 1.0]))
        assert np.allclose(bf.precoder, [1, 0]) and np.allclose(bf.filter, [1, 0])
        assert bf.gain == pytest.approx(3.0)

    def test_zero_channel(self):
        with pytest.raises(DegenerateChannelError):
            svd_beamform(np.zeros((2, 2)))

    @settings(max_examples=200, deadline=None)
    @given(seeds)
    def test_gain_matches_eigendecomposition(self, seed):
        H = rayleigh(seed)
        bf = svd_beamform(H)
        lam_max = np.linalg.eigvalsh(H.conj().T @ H)[-1]
        out = np.vdot(bf.filter, H @ bf.precoder)
        assert abs(out.imag) < 1e-9 * bf.gain
        assert out.real == pytest.approx(math.sqrt(lam_max), rel=1e-9)
        assert np.linalg.norm(bf.precoder) == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.norm(bf.filter) == pytest.approx(1.0, abs=1e-12)
        # phase convention: largest-magnitude precoder entry is real positive
        k = np.argmax(np.abs(bf.precoder))
        assert bf.precoder[k].real > 0 and abs(bf.precoder[k].imag) < 1e-15

    @settings(max_examples=100, deadline=None)
    @given(seeds)
    def test_reconstruction_and_determinism(self, seed):
        H = rayleigh(seed, 2, 3)
        u, s, vh = np.linalg.svd(H, full_matrices=False)
        assert np.linalg.norm(H - u @ np.diag(s) @ vh) / np.linalg.norm(H) < 1e-10
        a, b = svd_beamform(H), svd_beamform(H)
        assert np.array_equal(a.precoder, b.precoder) and a.gain == b.gain

    def test_left_basis_matches_filter(self):
        H = rayleigh(3)
        U = left_singular_basis(H)
        assert np.allclose(U[:, 0], svd_beamform(H).filter)
        assert np.allclose(U.conj().T @ U, np.eye(2))


class TestDecompose:
    def test_axis_aligned(self):
        i, q = decompose_against([1, 0], [3, 4])
        assert np.allclose(i, [3, 0]) and np.allclose(q, [0, 4])

    def test_orthogonal_input(self):
        i, q = decompose_against([1, 0], [0, 5])
        assert np.allclose(i, 0) and np.allclose(q, [0, 5])

    def test_non_unit_reference(self):
        with pytest.raises(NormalizationError):
            decompose_against([2, 0], [1, 1])

    @settings(max_examples=200, deadline=None)
    @given(seeds)
    def test_exact_split(self, seed):
        rng = np.random.default_rng(seed)
        d = sample_rayleigh(rng, 1, 3)[0]
        d = d / np.linalg.norm(d)
        v = sample_rayleigh(rng, 1, 3)[0]
        i, q = decompose_against(d, v)
        assert abs(np.vdot(d, q)) < 1e-12
        assert np.linalg.norm(i + q - v) < 1e-12


class TestMinNormSolve:
    def test_square_matches_solve(self):
        H, t = rayleigh(4), np.array([1.0, 1j])
        assert np.allclose(min_norm_solve(H, t), np.linalg.solve(H, t))

    def test_wide_is_minimum_norm(self):
        H, t = rayleigh(5, 2, 4), np.array([0.5, -1j])
        w = min_norm_solve(H, t)
        assert np.allclose(H @ w, t)
        # any null-space perturbation only increases the norm
        null = np.linalg.svd(H)[2][2:].conj().T
        for k in range(null.shape[1]):
            assert np.linalg.norm(w + 0.1 * null[:, k]) > np.linalg.norm(w)

    def test_singular(self):
        with pytest.raises(SingularChannelError):
            min_norm_solve(np.array([[1, 2], [2, 4]], dtype=complex), np.ones(2))

    def test_ill_conditioned(self):
        with pytest.raises(SingularChannelError):
            min_norm_solve(np.diag([1.0, 1e-13]), np.ones(2))


class TestAssembleRx:
    def test_single_term(self):
        H = rayleigh(6)
        p = svd_beamform(H).precoder
        y = assemble_rx((TransmitIntent(1.0, p), H))
        assert np.allclose(y, H @ p)

    def test_identity_sum(self):
        e1, e2 = np.array([1, 0]), np.array([0, 1])
        y = assemble_rx(
            (TransmitIntent(4.0, e1), np.eye(2)),
            [(TransmitIntent(1.0, e2), np.eye(2)), (TransmitIntent(9.0, e1), np.eye(2))],
        )
        assert np.allclose(y, [2 + 3, 1])

    def test_steering_overhead_is_paid_by_victim(self):
        e1 = np.array([1, 0])
        y = assemble_rx((TransmitIntent(1.0, e1), np.eye(2)), steering=(TransmitIntent(0.36, e1), np.eye(2)))
        assert np.allclose(y, [0.8 + 0.6, 0])

    def test_interferer_side_two_terms(self):
        # own data plus own steering signal, both through H_1
        H = rayleigh(8)
        p = svd_beamform(H).precoder
        q = np.array([0, 1])
        y = assemble_rx((TransmitIntent(1.0, p), H), steering=(TransmitIntent(0.25, q), H))
        assert np.allclose(y, math.sqrt(0.75) * H @ p + 0.5 * H @ q)

    def test_infeasible_overhead(self):
        with pytest.raises(InfeasiblePowerError):
            assemble_rx((TransmitIntent(1.0, [1, 0]), np.eye(2)), overhead=1.5)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            assemble_rx((TransmitIntent(1.0, [1, 0]), np.eye(2)), [(TransmitIntent(1.0, [1, 0]), np.ones((1, 2)))])

    def test_noise(self):
        y = assemble_rx((TransmitIntent(1.0, [1, 0]), np.eye(2)), noise_sample=[0.1, 0.2j])
        assert np.allclose(y, [1.1, 0.2j])

    @settings(max_examples=50, deadline=None)
    @given(seeds)
    def test_linearity(self, seed):
        rng = np.random.default_rng(seed)
        H = sample_rayleigh(rng, 2, 2)
        des = (TransmitIntent(1.0, svd_beamform(H).precoder), H)
        ints = []
        for _ in range(4):
            G = sample_rayleigh(rng, 2, 2)
            ints.append((TransmitIntent(float(rng.random()), svd_beamform(G).precoder), G))
        y = assemble_rx(des, ints)
        parts = assemble_rx(des, ints[:2]) + assemble_rx(des, ints[2:]) - assemble_rx(des)
        assert np.linalg.norm(y - parts) < 1e-12

    def test_noise_model(self):
        nm = NoiseModel.from_snr_db(20.0)
        assert nm.variance == pytest.approx(0.01)
        z = np.stack([nm.sample(np.random.default_rng(s), 2) for s in range(4000)])
        assert np.mean(np.abs(z) ** 2) == pytest.approx(0.01, rel=0.05)
        with pytest.raises(ValueError):
            NoiseModel(0.0)

    def test_intent_validation(self):
        with pytest.raises(NormalizationError):
            TransmitIntent(1.0, [1, 1])
        with pytest.raises(ValueError):
            TransmitIntent(-1.0, [1, 0])


class TestShannon:
    def test_values(self):
        assert shannon_se(0) == 0.0
        assert shannon_se(1) == 1.0
        assert shannon_se(99) == pytest.approx(6.643856189774724)

    def test_negative(self):
        with pytest.raises(ValueError):
            shannon_se(-1e-3)

    def test_vectorised_monotone(self):
        se = shannon_se(np.linspace(0, 100, 50))
        assert np.all(np.diff(se) > 0)
