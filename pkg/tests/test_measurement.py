import math

import numpy as np
import pytest

from pointer_ideality.measurement import (
    IDENTITY,
    P_MINUS_X,
    P_PLUS_X,
    PovmPair,
    QubitState,
    channel_probabilities,
    make_composite,
    povm_elements,
    povm_probabilities,
    sample_outcomes,
)
from pointer_ideality.measures import error_measure
from pointer_ideality.pointers import GaussianParams, gaussian_envelope, gaussian_post


class TestQubitState:
    def test_normalization_enforced(self):
        with pytest.raises(ValueError):
            QubitState(1.0, 1.0)

    def test_from_probability(self):
        chi = QubitState.from_up_probability(0.3, phase=0.5)
        assert abs(chi.alpha) ** 2 == pytest.approx(0.3)
        assert abs(chi.beta) ** 2 == pytest.approx(0.7)
        assert np.trace(chi.density_matrix).real == pytest.approx(1.0)

    def test_probability_range(self):
        with pytest.raises(ValueError):
            QubitState.from_up_probability(1.2)


class TestComposite:
    def test_marginal_norm(self, grid):
        plus, minus = gaussian_post(GaussianParams(1.0, 1.0, 1.0), grid)
        state = make_composite(QubitState.from_up_probability(0.3), plus, minus)
        assert np.sum(grid.weights * state.marginal_density()) == pytest.approx(1.0, abs=1e-10)

    def test_rejects_unnormalized(self, grid):
        psi = gaussian_envelope(grid, 1.0)
        with pytest.raises(ValueError):
            make_composite(QubitState(1.0, 0.0), psi.with_amplitudes(2 * psi.amplitudes), psi)

    def test_rejects_mixed_grids(self, grid, wide_grid):
        with pytest.raises(ValueError):
            make_composite(QubitState(1.0, 0.0), gaussian_envelope(grid, 1.0), gaussian_envelope(wide_grid, 1.0))


class TestChannelProbabilities:
    def test_sharp(self):
        assert channel_probabilities(QubitState(1.0, 0.0), 0.0) == (1.0, 0.0)

    def test_uninformative(self):
        chi = QubitState(math.sqrt(0.5), math.sqrt(0.5))
        up, down = channel_probabilities(chi, 0.5)
        assert up == pytest.approx(0.25) and down == pytest.approx(0.25)

    @pytest.mark.parametrize("E", [-0.1, 0.6])
    def test_range(self, E):
        with pytest.raises(ValueError):
            channel_probabilities(QubitState(1.0, 0.0), E)


class TestPovm:
    def test_sharp_limit(self):
        pair = povm_elements(0.0)
        np.testing.assert_allclose(pair.pi_plus, P_PLUS_X)
        np.testing.assert_allclose(pair.pi_minus, P_MINUS_X)

    def test_trivial_limit(self):
        pair = povm_elements(0.5)
        np.testing.assert_allclose(pair.pi_plus, IDENTITY / 2)
        np.testing.assert_allclose(pair.pi_minus, IDENTITY / 2)

    def test_probabilities(self):
        chi = QubitState.from_up_probability(0.7)
        p_plus, p_minus = povm_probabilities(chi, povm_elements(0.2))
        assert p_plus == pytest.approx(0.8 * 0.7 + 0.2 * 0.3)
        assert p_plus + p_minus == pytest.approx(1.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            PovmPair(P_PLUS_X, P_PLUS_X)
        with pytest.raises(ValueError):
            PovmPair(np.array([[1, 1j], [0, 0]]), IDENTITY - np.array([[1, 1j], [0, 0]]))
        with pytest.raises(ValueError):
            PovmPair(np.diag([1.5, 0.0]).astype(complex), np.diag([-0.5, 1.0]).astype(complex))

    @pytest.mark.parametrize("E", [-1e-3, 0.5001])
    def test_range(self, E):
        with pytest.raises(ValueError):
            povm_elements(E)


class TestSampling:
    def test_matches_povm(self, grid):
        plus, minus = gaussian_post(GaussianParams(1.0, 1.0, 1.0), grid)
        E = error_measure(plus, minus)
        chi = QubitState.from_up_probability(0.3)
        n = 200_000
        counts = sample_outcomes(make_composite(chi, plus, minus), n, seed=11)
        expected = povm_probabilities(chi, povm_elements(E))[0]
        assert abs(counts.upper_fraction - expected) <= 4 * math.sqrt(expected * (1 - expected) / n)
        assert counts.n_upper + counts.n_lower == n

    def test_deterministic(self, grid):
        plus, minus = gaussian_post(GaussianParams(1.0, 1.0, 1.0), grid)
        state = make_composite(QubitState.from_up_probability(0.5), plus, minus)
        assert sample_outcomes(state, 5000, 3) == sample_outcomes(state, 5000, 3)

    def test_sharp_separation(self, grid):
        plus, minus = gaussian_post(GaussianParams(1.0, 16.0, 0.5), grid)
        counts = sample_outcomes(make_composite(QubitState.from_up_probability(0.25), plus, minus), 40_000, 1)
        assert abs(counts.upper_fraction - 0.25) <= 4 * math.sqrt(0.25 * 0.75 / 40_000)

    def test_needs_samples(self, grid):
        plus, minus = gaussian_post(GaussianParams(1.0, 1.0, 1.0), grid)
        with pytest.raises(ValueError):
            sample_outcomes(make_composite(QubitState(1.0, 0.0), plus, minus), 0, 1)
