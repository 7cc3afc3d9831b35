"""Tests for pilot generation, synthesis, quantization and count statistics."""

import math

import numpy as np
import pytest
from scipy.special import log_ndtr

from onebit_chanest.kernels import qfunc
from onebit_chanest.signal_model import (
    BinaryObservation,
    CountStatistic,
    IdealObservation,
    PilotSequence,
    count_loglike,
    count_stats,
    make_pilot,
    quantize,
    sample_loglike,
    synth_ideal,
)


class TestMakePilot:
    def test_alternating(self):
        np.testing.assert_array_equal(make_pilot(4, "alternating").symbols, [1, -1, 1, -1])

    def test_block(self):
        np.testing.assert_array_equal(make_pilot(6, "block").symbols, [1, 1, 1, -1, -1, -1])

    def test_shuffled_is_balanced_and_seeded(self):
        p1 = make_pilot(1000, "shuffled", seed=7)
        p2 = make_pilot(1000, "shuffled", seed=7)
        assert int(p1.symbols.sum()) == 0
        np.testing.assert_array_equal(p1.symbols, p2.symbols)
        assert not np.array_equal(p1.symbols, make_pilot(1000, "shuffled", seed=8).symbols)

    @pytest.mark.parametrize("n", [0, -2, 3, 7])
    def test_bad_length_rejected(self, n):
        with pytest.raises(ValueError):
            make_pilot(n)

    def test_shuffled_requires_seed(self):
        with pytest.raises(ValueError, match="seed"):
            make_pilot(8, "shuffled")

    def test_unknown_layout(self):
        with pytest.raises(ValueError, match="layout"):
            make_pilot(8, "zigzag")

    def test_unbalanced_vector_rejected(self):
        with pytest.raises(ValueError, match="balanced"):
            PilotSequence(np.array([1, 1, 1, -1]))


class TestSynthIdeal:
    def test_reproducible_bit_for_bit(self):
        pilot = make_pilot(256)
        a = synth_ideal(pilot, 0.7, seed=123)
        b = synth_ideal(pilot, 0.7, seed=123)
        np.testing.assert_array_equal(a.samples, b.samples)

    def test_additive_structure(self):
        pilot = make_pilot(64)
        y0 = synth_ideal(pilot, 0.0, seed=5)
        y1 = synth_ideal(pilot, 1.0, seed=5)
        np.testing.assert_allclose(y1.samples - y0.samples, pilot.symbols, atol=1e-15)

    def test_zero_gain_noise_moments(self):
        n = 10**6
        pilot = make_pilot(n)
        y = synth_ideal(pilot, 0.0, seed=42)
        assert abs(y.samples.mean()) < 4.0 / math.sqrt(n)
        assert 0.994 <= y.samples.var() <= 1.006

    def test_noise_variance_excluding_signal(self):
        n = 10**6
        pilot = make_pilot(n)
        y = synth_ideal(pilot, 0.5, seed=901)
        noise = y.samples - 0.5 * pilot.symbols
        assert 0.994 <= noise.var() <= 1.006


class TestQuantize:
    def test_basic_signs(self):
        y = IdealObservation(np.array([0.5, -0.5]))
        np.testing.assert_array_equal(quantize(y, 0.0).signs, [1, -1])

    def test_tie_maps_to_plus_one(self):
        y = IdealObservation(np.array([0.3, 0.3]))
        np.testing.assert_array_equal(quantize(y, 0.3).signs, [1, 1])

    def test_threshold_shift_identity(self):
        rng = np.random.default_rng(3)
        samples = rng.normal(size=100)
        alpha = 0.4
        direct = quantize(IdealObservation(samples), alpha)
        shifted = quantize(IdealObservation(samples - alpha), 0.0)
        np.testing.assert_array_equal(direct.signs, shifted.signs)


class TestCountStats:
    def test_small_example(self):
        pilot = PilotSequence(np.array([1, -1, 1, -1]))
        r = BinaryObservation(np.array([1, -1, 1, -1]))
        c = count_stats(r, pilot)
        assert (c.k_plus, c.k_minus, c.half_n) == (2, 0, 2)

    def test_all_plus_observation(self):
        pilot = make_pilot(10, "block")
        r = BinaryObservation(np.ones(10, dtype=np.int8))
        c = count_stats(r, pilot)
        assert c.k_plus == c.k_minus == 5

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            count_stats(BinaryObservation(np.array([1, -1])), make_pilot(4))

    def test_bounds_validation(self):
        with pytest.raises(ValueError):
            CountStatistic(k_plus=5, k_minus=0, half_n=4)

    def test_empirical_frequencies_match_tail_probabilities(self):
        # k+/M -> Q(alpha - zeta), k-/M -> Q(alpha + zeta) for large N
        n, zeta, alpha = 10**6, 0.5, 0.2
        pilot = make_pilot(n)
        counts = count_stats(quantize(synth_ideal(pilot, zeta, seed=77), alpha), pilot)
        m = n // 2
        for k, prob in ((counts.k_plus, qfunc(alpha - zeta)), (counts.k_minus, qfunc(alpha + zeta))):
            se = math.sqrt(prob * (1.0 - prob) / m)
            assert abs(k / m - prob) < 4.0 * se


class TestLogLikelihoods:
    def test_count_form_equals_sample_form(self):
        rng = np.random.default_rng(11)
        pilot = make_pilot(64, "shuffled", seed=2)
        for _ in range(100):
            zeta, alpha = rng.uniform(-1.5, 1.5, size=2)
            y = synth_ideal(pilot, zeta, seed=int(rng.integers(2**32)))
            r = quantize(y, alpha)
            counts = count_stats(r, pilot)
            assert count_loglike(counts, zeta, alpha) == pytest.approx(
                sample_loglike(r, pilot, zeta, alpha), abs=1e-10
            )

    def test_count_form_against_independent_evaluation(self):
        # log Q(t) == log_ndtr(-t) gives an implementation-independent check
        pilot = make_pilot(32)
        r = quantize(synth_ideal(pilot, 0.4, seed=9), 0.1)
        c = count_stats(r, pilot)
        zeta, alpha = 0.37, 0.12
        u, v = alpha - zeta, alpha + zeta
        m = c.half_n
        ref = (
            c.k_plus * log_ndtr(-u)
            + (m - c.k_plus) * log_ndtr(u)
            + c.k_minus * log_ndtr(-v)
            + (m - c.k_minus) * log_ndtr(v)
        )
        assert count_loglike(c, zeta, alpha) == pytest.approx(float(ref), rel=1e-12)
