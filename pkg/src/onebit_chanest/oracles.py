"""Independent numerical cross-checks of the closed-form bounds.

These routines deliberately avoid the closed-form algebra they are meant to
verify: the Fisher matrix is rebuilt as an exact expectation over the binary
outcome of finite-difference scores of the per-sample log-likelihood, and
the hybrid expectations are re-done with an adaptive integrator instead of
the fixed Gauss-Hermite rule. They back the ``selftest`` CLI command and the
test suite.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate

from .bounds import (
    FisherMatrix,
    HybridPrior,
    QuadratureSpec,
    SystemPoint,
    crlb_1bit_unknown,
    fisher_1bit,
    loss_deterministic,
    psi_h,
)
from .kernels import LOG_2PI, log_phi, log_qfunc, phi_pair


def fisher_1bit_expectation_fd(point: SystemPoint, step: float = 1e-5) -> FisherMatrix:
    """Fisher matrix as an exact discrete expectation of finite-difference scores.

    For each pilot symbol x in {+1, -1} and each outcome r in {+1, -1}, the
    score of log Q(r*(alpha - zeta*x)) is approximated by central differences
    of width ``step`` in zeta and alpha, then squared and averaged under the
    exact outcome probabilities. Balanced pilots carry N/2 samples of each
    symbol.
    """

    def loglike(r: float, x: float, zeta: float, alpha: float) -> float:
        return log_qfunc(r * (alpha - zeta * x))

    f_zz = f_za = f_aa = 0.0
    for x in (1.0, -1.0):
        for r in (1.0, -1.0):
            prob = math.exp(loglike(r, x, point.zeta, point.alpha))
            sz = (
                loglike(r, x, point.zeta + step, point.alpha)
                - loglike(r, x, point.zeta - step, point.alpha)
            ) / (2.0 * step)
            sa = (
                loglike(r, x, point.zeta, point.alpha + step)
                - loglike(r, x, point.zeta, point.alpha - step)
            ) / (2.0 * step)
            f_zz += prob * sz * sz
            f_za += prob * sz * sa
            f_aa += prob * sa * sa
    half = 0.5 * point.n
    return FisherMatrix(f_zz=half * f_zz, f_za=half * f_za, f_aa=half * f_aa)


def _gauss_quad_expect(
    f_log: Callable[[float], float], prior: HybridPrior, alpha: float, rtol: float = 1e-11
) -> float:
    """Adaptive integral of exp(f_log(zeta)) * N(zeta; 0, sigma2) d zeta.

    The integrand is assembled in the log domain so tail evaluations never
    overflow. The window is wide enough to cover the tilted peak that the
    exp-growing integrands develop away from zero.
    """
    s2 = prior.sigma2
    sigma = math.sqrt(s2)
    log_norm = -0.5 * LOG_2PI - math.log(sigma)
    width = sigma / math.sqrt(max(1.0 - s2, 0.01))
    center = abs(alpha) * s2 / max(1.0 - s2, 0.01)
    lim = max(10.0 * sigma, center + 12.0 * width)

    def integrand(z: float) -> float:
        return math.exp(f_log(z) - 0.5 * z * z / s2 + log_norm)

    pts = sorted({-abs(alpha), 0.0, abs(alpha), center, -center})
    pts = [p for p in pts if -lim < p < lim]
    val, _ = integrate.quad(
        integrand, -lim, lim, points=pts, epsabs=0.0, epsrel=rtol, limit=400
    )
    return val


def psi_h_adaptive(alpha: float, prior: HybridPrior, rtol: float = 1e-11) -> float:
    """E[1/phi(alpha + zeta)] by adaptive quadrature; oracle for ``psi_h``."""
    return _gauss_quad_expect(lambda z: -log_phi(alpha + z), prior, alpha, rtol)


def expect_inv_density_sum_adaptive(
    alpha: float, prior: HybridPrior, rtol: float = 1e-11
) -> float:
    """E[1/(phi_plus + phi_minus)] by adaptive quadrature."""

    def f_log(z: float) -> float:
        return -float(np.logaddexp(log_phi(alpha + z), log_phi(alpha - z)))

    return _gauss_quad_expect(f_log, prior, alpha, rtol)


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str


def run_selftest(rng_seed: int = 20240) -> list[CheckResult]:
    """Oracle-equivalence suite behind the ``selftest`` CLI command.

    Checks, in order: the closed-form Fisher matrix against the
    finite-difference expectation oracle; the matrix-form CRLB against its
    harmonic-mean simplification; the Gauss-Hermite hybrid expectation
    against adaptive integration; and the loss symmetries.
    """
    results: list[CheckResult] = []

    # 1. Closed-form Fisher vs finite-difference expectation on a 5x5 grid.
    worst = 0.0
    for zeta in np.linspace(0.1, 1.5, 5):
        for alpha in np.linspace(0.1, 1.0, 5):
            point = SystemPoint(float(zeta), float(alpha), n=1000)
            exact = fisher_1bit(point)
            fd = fisher_1bit_expectation_fd(point)
            for a, b in zip(exact, fd):
                worst = max(worst, abs(a - b) / abs(a))
    results.append(
        CheckResult(
            "fisher closed form vs finite-difference expectation",
            worst < 1e-6,
            f"max relative deviation {worst:.3e} (tol 1e-6)",
        )
    )

    # 2. Matrix-form CRLB vs harmonic-mean simplification.
    rng = np.random.default_rng(rng_seed)
    worst = 0.0
    for _ in range(1000):
        zeta, alpha = rng.uniform(-2.0, 2.0, size=2)
        point = SystemPoint(float(zeta), float(alpha), n=1000)
        matrix_form = crlb_1bit_unknown(point)
        pp, pm = phi_pair(point.zeta, point.alpha)
        simplified = (1.0 / pp + 1.0 / pm) / (2.0 * point.n)
        worst = max(worst, abs(matrix_form - simplified) / simplified)
    results.append(
        CheckResult(
            "matrix-form CRLB vs harmonic simplification",
            worst < 1e-12,
            f"max relative deviation {worst:.3e} over 1000 points (tol 1e-12)",
        )
    )

    # 3. Gauss-Hermite hybrid expectation vs adaptive integration.
    quad = QuadratureSpec()
    worst = 0.0
    for snr_db in (-25.0, -10.0, -5.0, -2.5):
        prior = HybridPrior(10.0 ** (snr_db / 10.0))
        for alpha in np.linspace(0.0, 1.0, 6):
            gh = psi_h(float(alpha), prior, quad)
            ref = psi_h_adaptive(float(alpha), prior)
            worst = max(worst, abs(gh - ref) / ref)
    results.append(
        CheckResult(
            "Gauss-Hermite hybrid expectation vs adaptive integration",
            worst < 1e-5,
            f"max relative deviation {worst:.3e} (tol 1e-5)",
        )
    )

    # 4. Loss symmetry under sign flips of offset and gain.
    worst = 0.0
    for zeta, alpha in ((0.3, 0.4), (0.75, 0.2), (1.5, 1.0)):
        base = loss_deterministic(zeta, alpha)
        for flipped in (loss_deterministic(-zeta, alpha), loss_deterministic(zeta, -alpha)):
            worst = max(worst, abs(flipped.chi - base.chi), abs(flipped.chi_star - base.chi_star))
    results.append(
        CheckResult(
            "loss symmetry under sign flips",
            worst < 1e-12,
            f"max deviation {worst:.3e} (tol 1e-12)",
        )
    )
    return results
