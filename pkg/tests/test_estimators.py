"""Tests for the ideal and 1-bit estimators.

The numeric oracles here (grid-plus-refinement maximizer, random probing)
evaluate the likelihood through scipy's log_ndtr rather than the package's
own tail kernels, so the closed forms are checked against an independent
path end to end.
"""

import math

import numpy as np
import pytest
from scipy.special import log_ndtr

from onebit_chanest.bounds import HybridPrior, SystemPoint, crlb_1bit_unknown
from onebit_chanest.errors import ConvergenceError
from onebit_chanest.estimators import (
    SolverOptions,
    ideal_map,
    ideal_mle,
    onebit_jmapmle,
    onebit_jmle,
    onebit_mle_known_alpha,
)
from onebit_chanest.kernels import qfunc
from onebit_chanest.signal_model import (
    CountStatistic,
    IdealObservation,
    count_stats,
    make_pilot,
    quantize,
    synth_ideal,
)


def _loglike_ref(counts, zeta, alpha):
    """Count log-likelihood via scipy only (log Q(t) == log_ndtr(-t))."""
    u = alpha - zeta
    v = alpha + zeta
    m = counts.half_n
    return (
        counts.k_plus * log_ndtr(-u)
        + (m - counts.k_plus) * log_ndtr(u)
        + counts.k_minus * log_ndtr(-v)
        + (m - counts.k_minus) * log_ndtr(v)
    )


def _grid_refine_maximizer(counts):
    """Dense grid over [-5, 5]^2 followed by coordinate golden refinement."""
    z = np.linspace(-5.0, 5.0, 201)
    a = np.linspace(-5.0, 5.0, 201)
    zz, aa = np.meshgrid(z, a, indexing="ij")
    ll = _loglike_ref(counts, zz, aa)
    i, j = np.unravel_index(np.argmax(ll), ll.shape)
    z0, a0 = z[i], a[j]

    gold = (math.sqrt(5.0) - 1.0) / 2.0

    def line_max(f, lo, hi):
        c, d = hi - gold * (hi - lo), lo + gold * (hi - lo)
        fc, fd = f(c), f(d)
        for _ in range(120):
            if fc > fd:
                hi, d, fd = d, c, fc
                c = hi - gold * (hi - lo)
                fc = f(c)
            else:
                lo, c, fc = c, d, fd
                d = lo + gold * (hi - lo)
                fd = f(d)
        return 0.5 * (lo + hi)

    for _ in range(40):
        z0 = line_max(lambda t: _loglike_ref(counts, t, a0), z0 - 0.2, z0 + 0.2)
        a0 = line_max(lambda t: _loglike_ref(counts, z0, t), a0 - 0.2, a0 + 0.2)
    return z0, a0


class TestIdealMle:
    def test_noiseless_identification(self):
        pilot = make_pilot(32)
        y = IdealObservation(0.85 * pilot.symbols.astype(float))
        assert ideal_mle(y, pilot) == pytest.approx(0.85, abs=1e-15)

    def test_zero_gain_within_clt_band(self):
        n = 10**6
        pilot = make_pilot(n)
        y = synth_ideal(pilot, 0.0, seed=8)
        assert abs(ideal_mle(y, pilot)) < 4.0 / math.sqrt(n)

    def test_mse_attains_ideal_bound(self):
        n, trials = 1000, 10**4
        pilot = make_pilot(n)
        errs = np.empty(trials)
        for t in range(trials):
            y = synth_ideal(pilot, 0.5, seed=(1000 + t))
            errs[t] = ideal_mle(y, pilot) - 0.5
        assert np.mean(errs**2) == pytest.approx(1.0 / n, rel=0.05)

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            ideal_mle(IdealObservation(np.zeros(6)), make_pilot(4))


class TestIdealMap:
    def test_flat_prior_limit(self):
        pilot = make_pilot(128)
        y = synth_ideal(pilot, 0.3, seed=21)
        assert ideal_map(y, pilot, HybridPrior(1e12)) == pytest.approx(
            ideal_mle(y, pilot), rel=1e-9
        )

    def test_zero_observation_returns_prior_mean(self):
        pilot = make_pilot(16)
        y = IdealObservation(np.zeros(16))
        assert ideal_map(y, pilot, HybridPrior(0.5)) == 0.0

    def test_hybrid_mse_matches_posterior_variance(self):
        # exact finite-N risk of the posterior mode is sigma2/(1 + N*sigma2)
        n, trials, sigma2 = 1000, 10**4, 0.1
        pilot = make_pilot(n)
        prior = HybridPrior(sigma2)
        rng = np.random.default_rng(40)
        errs = np.empty(trials)
        for t in range(trials):
            zeta = math.sqrt(sigma2) * rng.standard_normal()
            y = synth_ideal(pilot, zeta, seed=(7_000_000 + t))
            errs[t] = ideal_map(y, pilot, prior) - zeta
        exact = sigma2 / (1.0 + n * sigma2)
        mse = float(np.mean(errs**2))
        assert mse == pytest.approx(exact, rel=0.02)
        assert mse == pytest.approx(1.0 / n, rel=0.05)  # large N*sigma2 regime


class TestOnebitJmle:
    def test_balanced_counts_give_origin(self):
        est = onebit_jmle(CountStatistic(k_plus=100, k_minus=100, half_n=200))
        assert (est.zeta_hat, est.alpha_hat) == (0.0, 0.0)
        assert est.converged and not est.clamped

    def test_inverse_q_of_tail_probabilities(self):
        # frequencies near Q(1) and Q(-1) invert to zeta=-1, alpha=0
        m = 2**20
        counts = CountStatistic(
            k_plus=round(qfunc(1.0) * m), k_minus=round(qfunc(-1.0) * m), half_n=m
        )
        est = onebit_jmle(counts)
        assert est.zeta_hat == pytest.approx(-1.0, abs=1e-5)
        assert est.alpha_hat == pytest.approx(0.0, abs=1e-5)

    def test_matches_grid_refinement_oracle(self):
        rng = np.random.default_rng(1234)
        m = 200
        for _ in range(50):
            counts = CountStatistic(
                k_plus=int(rng.integers(2, m - 1)),
                k_minus=int(rng.integers(2, m - 1)),
                half_n=m,
            )
            est = onebit_jmle(counts)
            z_ref, a_ref = _grid_refine_maximizer(counts)
            assert est.zeta_hat == pytest.approx(z_ref, abs=1e-6)
            assert est.alpha_hat == pytest.approx(a_ref, abs=1e-6)

    def test_degenerate_counts_clamped(self):
        est = onebit_jmle(CountStatistic(k_plus=0, k_minus=200, half_n=200))
        assert est.clamped
        assert math.isfinite(est.zeta_hat) and math.isfinite(est.alpha_hat)


class TestOnebitJmapmle:
    def test_flat_prior_recovers_mle(self):
        counts = CountStatistic(k_plus=37, k_minus=141, half_n=200)
        mle = onebit_jmle(counts)
        est = onebit_jmapmle(counts, HybridPrior(1e14))
        assert est.zeta_hat == pytest.approx(mle.zeta_hat, abs=1e-7)
        assert est.alpha_hat == pytest.approx(mle.alpha_hat, abs=1e-7)

    def test_balanced_counts_stationary_at_origin(self):
        est = onebit_jmapmle(CountStatistic(100, 100, 200), HybridPrior(0.3))
        assert (est.zeta_hat, est.alpha_hat) == (0.0, 0.0)
        assert est.iterations == 0

    def test_beats_random_probing(self):
        rng = np.random.default_rng(777)
        m = 150
        probes_z = rng.uniform(-5.0, 5.0, 10**4)
        probes_a = rng.uniform(-5.0, 5.0, 10**4)
        for _ in range(50):
            counts = CountStatistic(
                k_plus=int(rng.integers(1, m)),
                k_minus=int(rng.integers(1, m)),
                half_n=m,
            )
            sigma2 = float(rng.uniform(0.05, 2.0))
            est = onebit_jmapmle(counts, HybridPrior(sigma2))
            attained = _loglike_ref(counts, est.zeta_hat, est.alpha_hat) - (
                est.zeta_hat**2 / (2.0 * sigma2)
            )
            probe_best = np.max(
                _loglike_ref(counts, probes_z, probes_a) - probes_z**2 / (2.0 * sigma2)
            )
            assert attained >= probe_best - 1e-9

    def test_prior_shrinks_gain_estimate(self):
        counts = CountStatistic(k_plus=30, k_minus=160, half_n=200)
        mle = onebit_jmle(counts)
        mapml = onebit_jmapmle(counts, HybridPrior(0.05))
        assert abs(mapml.zeta_hat) < abs(mle.zeta_hat)

    def test_unreachable_tolerance_raises_with_iterate(self):
        counts = CountStatistic(k_plus=37, k_minus=141, half_n=200)
        with pytest.raises(ConvergenceError) as exc:
            onebit_jmapmle(counts, HybridPrior(0.3), SolverOptions(gtol=1e-30, max_iter=2))
        assert exc.value.last_iterate is not None
        assert exc.value.grad_norm is not None


class TestOnebitKnownAlpha:
    def test_matches_scalar_scan(self):
        counts = CountStatistic(k_plus=50, k_minus=160, half_n=220)
        est = onebit_mle_known_alpha(counts, 0.25)
        zs = np.linspace(est.zeta_hat - 0.01, est.zeta_hat + 0.01, 2001)
        ll = _loglike_ref(counts, zs, 0.25)
        assert abs(zs[np.argmax(ll)] - est.zeta_hat) < 2e-5
        assert est.alpha_hat == 0.25

    def test_balanced_counts_zero_gain(self):
        est = onebit_mle_known_alpha(CountStatistic(80, 80, 160), 0.0)
        assert est.zeta_hat == 0.0


class TestAsymptotics:
    """Estimator-level Monte Carlo invariants (bound attainment lives in acceptance)."""

    @staticmethod
    def _mse_joint(n, trials, zeta, alpha, seed0):
        pilot = make_pilot(n)
        errs_z = np.empty(trials)
        errs_a = np.empty(trials)
        for t in range(trials):
            y = synth_ideal(pilot, zeta, seed=(seed0 + t))
            est = onebit_jmle(count_stats(quantize(y, alpha), pilot))
            errs_z[t] = est.zeta_hat - zeta
            errs_a[t] = est.alpha_hat - alpha
        return float(np.mean(errs_z**2)), float(np.mean(errs_a**2))

    def test_consistency_rate(self):
        # quadrupling N four times over should shrink the MSE ~16x
        mse_small, _ = self._mse_joint(1024, 2000, 0.5, 0.3, seed0=50_000)
        mse_big, _ = self._mse_joint(16384, 2000, 0.5, 0.3, seed0=60_000)
        assert 12.0 <= mse_small / mse_big <= 20.0

    def test_offset_estimate_attains_its_bound(self):
        n = 4096
        _, mse_alpha = self._mse_joint(n, 2000, 0.5, 0.3, seed0=70_000)
        # the offset coordinate of the inverse information matrix equals the
        # gain coordinate here because the diagonal entries coincide
        bound = crlb_1bit_unknown(SystemPoint(0.5, 0.3, n))
        assert 0.9 <= mse_alpha / bound <= 1.1
