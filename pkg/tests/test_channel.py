import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparse_nlmf.channel import (
    ChannelRealization,
    NoiseModel,
    SparseChannelSpec,
    TrainingSequence,
    generate_channel,
    generate_training_sequence,
    observe,
    regressor_at,
    regressor_matrix,
)


def rng(seed=0):
    return np.random.default_rng(seed)


class TestSparseChannelSpec:
    def test_tap_variance_is_inverse_sparsity(self):
        assert SparseChannelSpec(16, 4).tap_variance == 0.25

    @pytest.mark.parametrize("fir,k", [(16, 17), (16, 0), (0, 1)])
    def test_rejects_invalid(self, fir, k):
        with pytest.raises(ValueError):
            SparseChannelSpec(fir, k)


class TestGenerateChannel:
    def test_single_tap(self):
        ch = generate_channel(SparseChannelSpec(16, 1), rng())
        assert ch.coefficients.shape == (16,)
        assert np.count_nonzero(ch.coefficients) == 1
        assert len(ch.support) == 1

    def test_fully_dense(self):
        ch = generate_channel(SparseChannelSpec(16, 16), rng())
        assert ch.support == tuple(range(16))

    @given(st.integers(1, 32).flatmap(lambda f: st.tuples(st.just(f), st.integers(1, f))), st.integers(0, 2**32))
    @settings(max_examples=100, deadline=None)
    def test_support_invariants(self, fk, seed):
        fir, k = fk
        ch = generate_channel(SparseChannelSpec(fir, k), rng(seed))
        assert len(ch.support) == k
        assert list(ch.support) == sorted(set(ch.support))
        off = np.ones(fir, bool)
        off[list(ch.support)] = False
        assert np.all(ch.coefficients[off] == 0.0)

    def test_expected_energy_is_one(self):
        # std of ||h||^2 for K=4 Gaussian taps of variance 1/4 is sqrt(4 * 2 / 16) ~ 0.71,
        # so the standard error over 1e4 draws is ~0.007 and [0.95, 1.05] is ~7 sigma.
        g = rng(11)
        spec = SparseChannelSpec(16, 4)
        energies = [float(np.sum(generate_channel(spec, g).coefficients ** 2)) for _ in range(10_000)]
        assert 0.95 <= np.mean(energies) <= 1.05

    def test_same_seed_same_channel(self):
        spec = SparseChannelSpec(16, 6)
        a = generate_channel(spec, rng(5))
        b = generate_channel(spec, rng(5))
        assert a.support == b.support
        assert a.coefficients.tobytes() == b.coefficients.tobytes()


class TestTrainingSequence:
    def test_binary_symbols(self):
        seq = generate_training_sequence(8, rng())
        assert len(seq) == 8
        assert set(np.unique(seq.symbols)) <= {-1.0, 1.0}

    @given(st.integers(1, 500), st.integers(0, 2**32))
    @settings(max_examples=50, deadline=None)
    def test_unit_power(self, length, seed):
        seq = generate_training_sequence(length, rng(seed))
        assert np.mean(seq.symbols**2) == 1.0

    def test_balanced(self):
        seq = generate_training_sequence(100_000, rng(3))
        assert -0.02 <= seq.symbols.mean() <= 0.02

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            generate_training_sequence(0, rng())

    def test_deterministic(self):
        a = generate_training_sequence(1000, rng(9)).symbols
        b = generate_training_sequence(1000, rng(9)).symbols
        assert a.tobytes() == b.tobytes()


class TestRegressor:
    seq = TrainingSequence(np.array([1.0, -1.0, 1.0]))

    def test_zero_padded_start(self):
        np.testing.assert_array_equal(regressor_at(self.seq, 0, 3), [1.0, 0.0, 0.0])

    def test_full_window(self):
        np.testing.assert_array_equal(regressor_at(self.seq, 2, 3), [1.0, -1.0, 1.0])

    def test_window_is_most_recent_first(self):
        seq = TrainingSequence(np.array([1.0, 1.0, -1.0, 1.0]))
        np.testing.assert_array_equal(regressor_at(seq, 3, 2), [1.0, -1.0])

    @pytest.mark.parametrize("n", [-1, 3])
    def test_out_of_range(self, n):
        with pytest.raises(IndexError):
            regressor_at(self.seq, n, 3)

    @given(st.integers(1, 24), st.integers(0, 2**32))
    @settings(max_examples=50, deadline=None)
    def test_full_energy_after_warmup(self, fir, seed):
        seq = generate_training_sequence(3 * fir, rng(seed))
        for n in range(fir - 1, len(seq)):
            x = regressor_at(seq, n, fir)
            assert x @ x == fir

    def test_matrix_matches_rows(self):
        seq = generate_training_sequence(50, rng(2))
        X = regressor_matrix(seq, 16, 40)
        assert X.shape == (40, 16)
        for n in range(40):
            np.testing.assert_array_equal(X[n], regressor_at(seq, n, 16))


class TestObserve:
    def test_noiseless_dot_product(self):
        ch = ChannelRealization(np.array([0.5, -0.5]), (0, 1))
        d = observe(ch, np.array([1.0, -1.0]), NoiseModel.from_variance(0.0), rng())
        assert d == 1.0

    def test_zero_channel(self):
        ch = ChannelRealization(np.zeros(4), ())
        assert observe(ch, np.array([1.0, -1.0, 1.0, 1.0]), NoiseModel.from_variance(0.0), rng()) == 0.0

    def test_length_mismatch(self):
        ch = ChannelRealization(np.zeros(4), ())
        with pytest.raises(ValueError):
            observe(ch, np.ones(3), NoiseModel(10.0), rng())

    def test_noise_statistics(self):
        ch = ChannelRealization(np.array([0.3, 0.0]), (0,))
        g = rng(4)
        x = np.array([1.0, -1.0])
        z = np.array([observe(ch, x, NoiseModel(10.0), g) - 0.3 for _ in range(20_000)])
        # std error of the sample variance is 0.1 * sqrt(2 / 2e4) = 0.001
        assert abs(z.mean()) < 0.01
        assert abs(z.var() - 0.1) < 0.006


class TestNoiseModel:
    def test_snr_to_variance(self):
        assert NoiseModel(10.0).variance == pytest.approx(0.1, rel=1e-15)
        assert NoiseModel(8.0).variance == pytest.approx(10 ** -0.8, rel=1e-15)

    def test_infinite_snr_is_noiseless(self):
        assert NoiseModel(float("inf")).variance == 0.0

    def test_from_variance_round_trip(self):
        assert NoiseModel.from_variance(0.1).snr_db == pytest.approx(10.0)
