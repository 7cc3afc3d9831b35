"""The four estimators: ideal MLE/MAP and 1-bit joint MLE / joint MAP-MLE.

Ideal receiver estimates are closed form (matched filter, shrunk matched
filter). The 1-bit joint MLE is also closed form: under a balanced pilot the
log-likelihood separates in u = alpha - zeta and v = alpha + zeta, so the
maximizer is an inverse-Q transform of the two clamped empirical
frequencies. The joint MAP-MLE adds a Gaussian prior penalty on zeta and is
found by damped Newton ascent started at the joint MLE; the binary
log-likelihood is strictly concave in (zeta, alpha) (both log Q and its
complement are log-concave), so the ascent is globally convergent and the
golden-section fallback is a safety net rather than a workhorse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import HybridPrior
from .errors import ConvergenceError
from .kernels import LOG_2PI, log_qfunc, qfunc_inv
from .signal_model import CountStatistic, IdealObservation, PilotSequence, count_loglike


@dataclass(frozen=True)
class SolverOptions:
    """Stopping rules for the iterative 1-bit estimators."""

    gtol: float = 1e-10
    max_iter: int = 100

    def __post_init__(self):
        if self.gtol <= 0.0 or self.max_iter < 1:
            raise ValueError("gtol must be positive and max_iter >= 1")


@dataclass(frozen=True)
class JointEstimate:
    """A (zeta, alpha) estimate with solver diagnostics.

    ``clamped`` records whether an empirical frequency hit the 1/(2M)
    continuity clamp; frequent clamping in an experiment means the sample
    size is too small for the asymptotic regime the bounds describe.
    """

    zeta_hat: float
    alpha_hat: float
    converged: bool
    iterations: int
    clamped: bool


def ideal_mle(y: IdealObservation, pilot: PilotSequence) -> float:
    """Matched-filter estimate (sum x_n y_n) / N, the exact Gaussian MLE."""
    if len(y) != len(pilot):
        raise ValueError(
            f"length mismatch: observation has {len(y)} samples, pilot has {len(pilot)}"
        )
    # np.add.reduce keeps the reduction order fixed regardless of BLAS threading.
    return float(np.add.reduce(pilot.symbols * y.samples)) / len(pilot)


def ideal_map(y: IdealObservation, pilot: PilotSequence, prior: HybridPrior) -> float:
    """Posterior mode under the Gaussian prior: a shrunk matched filter.

    Gaussian prior times Gaussian likelihood is conjugate, so the maximizer
    is exactly sigma2 * (sum x_n y_n) / (1 + N*sigma2).
    """
    if len(y) != len(pilot):
        raise ValueError(
            f"length mismatch: observation has {len(y)} samples, pilot has {len(pilot)}"
        )
    corr = float(np.add.reduce(pilot.symbols * y.samples))
    return prior.sigma2 * corr / (1.0 + len(pilot) * prior.sigma2)


def _clamped_freqs(counts: CountStatistic) -> tuple[float, float, bool]:
    """Empirical firing frequencies clamped into [1/(2M), 1 - 1/(2M)]."""
    m = counts.half_n
    lo, hi = 0.5 / m, 1.0 - 0.5 / m
    clamped = False
    freqs = []
    for k in (counts.k_plus, counts.k_minus):
        p = k / m
        if p < lo:
            p, clamped = lo, True
        elif p > hi:
            p, clamped = hi, True
        freqs.append(p)
    return freqs[0], freqs[1], clamped


def onebit_jmle(counts: CountStatistic) -> JointEstimate:
    """Closed-form joint MLE of (zeta, alpha) from the sufficient counts.

    With p+ = k+/M and p- = k-/M clamped away from {0, 1}, the likelihood
    factorizes over u = alpha - zeta and v = alpha + zeta and is maximized
    exactly at u = Qinv(p+), v = Qinv(p-).
    """
    p_plus, p_minus, clamped = _clamped_freqs(counts)
    u = qfunc_inv(p_plus)
    v = qfunc_inv(p_minus)
    return JointEstimate(
        zeta_hat=0.5 * (v - u),
        alpha_hat=0.5 * (u + v),
        converged=True,
        iterations=0,
        clamped=clamped,
    )


def _hazard(t: float) -> float:
    """Gaussian hazard pdf(t)/Q(t), computed through the stable log tails."""
    return math.exp(-0.5 * t * t - 0.5 * LOG_2PI - log_qfunc(t))


def _grad_curv(t: float, k: int, m: int) -> tuple[float, float]:
    """First and second derivative in t of k*logQ(t) + (m-k)*logQ(-t)."""
    hp = _hazard(t)        # pdf/Q(t)
    hm = _hazard(-t)       # pdf/(1 - Q(t))
    grad = -k * hp + (m - k) * hm
    curv = -k * hp * (hp - t) - (m - k) * hm * (hm + t)
    return grad, curv


def _objective(counts: CountStatistic, zeta: float, alpha: float, sigma2: float | None) -> float:
    val = count_loglike(counts, zeta, alpha)
    if sigma2 is not None:
        val -= 0.5 * zeta * zeta / sigma2
    return val


def _gradient(
    counts: CountStatistic, zeta: float, alpha: float, sigma2: float | None
) -> tuple[float, float, float, float, float]:
    """Gradient and Hessian entries (gz, ga, hzz, hza, haa) of the objective."""
    gu, cu = _grad_curv(alpha - zeta, counts.k_plus, counts.half_n)
    gv, cv = _grad_curv(alpha + zeta, counts.k_minus, counts.half_n)
    gz = -gu + gv
    ga = gu + gv
    hzz = cu + cv
    hza = -cu + cv
    haa = cu + cv
    if sigma2 is not None:
        gz -= zeta / sigma2
        hzz -= 1.0 / sigma2
    return gz, ga, hzz, hza, haa


def _golden_max(f, lo: float, hi: float, tol: float = 1e-13, iters: int = 200) -> float:
    """Golden-section maximizer of a unimodal function on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if b - a < tol:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _alternating_ascent(
    counts: CountStatistic,
    sigma2: float | None,
    start: tuple[float, float],
    opts: SolverOptions,
) -> tuple[float, float, int]:
    """Coordinate-wise golden-section ascent; used only when Newton fails."""
    z, a = start
    span = 4.0 + abs(z) + abs(a)
    for sweep in range(1, 4 * opts.max_iter + 1):
        z = _golden_max(lambda t: _objective(counts, t, a, sigma2), z - span, z + span)
        a = _golden_max(lambda t: _objective(counts, z, t, sigma2), a - span, a + span)
        gz, ga, *_ = _gradient(counts, z, a, sigma2)
        gnorm = max(abs(gz), abs(ga))
        if gnorm < opts.gtol:
            return z, a, sweep
    raise ConvergenceError(
        f"1-bit estimator stalled at gradient norm {gnorm:.3e} (gtol={opts.gtol:g})",
        last_iterate=(z, a),
        grad_norm=gnorm,
    )


def _newton_joint(
    counts: CountStatistic,
    sigma2: float | None,
    start: tuple[float, float],
    opts: SolverOptions,
) -> tuple[float, float, bool, int]:
    """Damped Newton ascent on the (strictly concave) joint objective."""
    z, a = start
    obj = _objective(counts, z, a, sigma2)
    # Near the optimum the per-step improvement drops below one ulp of the
    # objective; accepting within rounding slack keeps the (globally
    # convergent, concave) ascent from stalling in the line search.
    slack = 1e-12 * (1.0 + abs(obj))
    for it in range(opts.max_iter):
        gz, ga, hzz, hza, haa = _gradient(counts, z, a, sigma2)
        if max(abs(gz), abs(ga)) < opts.gtol:
            return z, a, True, it
        det = hzz * haa - hza * hza
        if not (math.isfinite(det) and det > 0.0 and hzz < 0.0):
            break  # curvature unusable, hand over to the fallback
        dz = -(haa * gz - hza * ga) / det
        da = -(hzz * ga - hza * gz) / det
        step = 1.0
        while step > 1e-20:
            z_new, a_new = z + step * dz, a + step * da
            obj_new = _objective(counts, z_new, a_new, sigma2)
            if obj_new >= obj - slack:
                z, a, obj = z_new, a_new, max(obj, obj_new)
                break
            step *= 0.5
        else:
            break
    return z, a, False, opts.max_iter


def onebit_jmapmle(
    counts: CountStatistic, prior: HybridPrior, opts: SolverOptions = SolverOptions()
) -> JointEstimate:
    """Joint MAP-MLE: binary log-likelihood plus Gaussian prior penalty on zeta.

    Maximizes the count log-likelihood minus zeta**2/(2 sigma2) over
    (zeta, alpha) by damped Newton ascent from the joint MLE (prior dropped
    for the start point). On Newton failure it falls back to alternating
    golden-section ascent and raises ``ConvergenceError`` if that stalls too.
    """
    start_est = onebit_jmle(counts)
    start = (start_est.zeta_hat, start_est.alpha_hat)
    z, a, ok, iters = _newton_joint(counts, prior.sigma2, start, opts)
    if not ok:
        z, a, sweeps = _alternating_ascent(counts, prior.sigma2, (z, a), opts)
        iters += sweeps
    return JointEstimate(
        zeta_hat=z,
        alpha_hat=a,
        converged=True,
        iterations=iters,
        clamped=start_est.clamped,
    )


def onebit_mle_known_alpha(
    counts: CountStatistic, alpha: float, opts: SolverOptions = SolverOptions()
) -> JointEstimate:
    """1-bit MLE of zeta with the offset known and held at ``alpha``.

    One-dimensional damped Newton on the concentrated log-likelihood,
    started from the joint-MLE zeta; realizes the known-offset bound
    empirically.
    """
    p_plus, p_minus, clamped = _clamped_freqs(counts)
    z = 0.5 * (qfunc_inv(p_minus) - qfunc_inv(p_plus))
    obj = _objective(counts, z, alpha, None)
    slack = 1e-12 * (1.0 + abs(obj))
    for it in range(opts.max_iter):
        gz, _, hzz, _, _ = _gradient(counts, z, alpha, None)
        if abs(gz) < opts.gtol:
            return JointEstimate(z, alpha, True, it, clamped)
        if not (math.isfinite(hzz) and hzz < 0.0):
            break
        dz = -gz / hzz
        step = 1.0
        while step > 1e-20:
            z_new = z + step * dz
            obj_new = _objective(counts, z_new, alpha, None)
            if obj_new >= obj - slack:
                z, obj = z_new, max(obj, obj_new)
                break
            step *= 0.5
        else:
            break
    span = 4.0 + abs(z) + abs(alpha)
    z = _golden_max(lambda t: _objective(counts, t, alpha, None), z - span, z + span)
    gz, *_ = _gradient(counts, z, alpha, None)
    if abs(gz) >= opts.gtol:
        raise ConvergenceError(
            f"known-offset MLE stalled at |grad|={abs(gz):.3e} (gtol={opts.gtol:g})",
            last_iterate=(z, alpha),
            grad_norm=abs(gz),
        )
    return JointEstimate(z, alpha, True, opts.max_iter, clamped)
