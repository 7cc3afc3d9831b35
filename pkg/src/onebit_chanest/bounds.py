"""Fisher information, CRLBs and quantization-loss ratios.

Deterministic setup: for a channel gain zeta and quantizer offset alpha, the
ideal receiver has Fisher information N, while the 1-bit receiver has the
2x2 information matrix

    F_zz = F_aa = (N/2) * (phi_plus + phi_minus),
    F_za = (N/2) * (phi_plus - phi_minus),

built from the per-symbol densities of :mod:`.kernels`. Inverting it gives
the channel-gain CRLB with the offset as a jointly estimated nuisance
parameter; fixing the offset gives 1/F_zz instead. The two quantization
losses are the ratios of the ideal bound to these, which reduce to the
harmonic and arithmetic means of (phi_plus, phi_minus).

Hybrid setup: the channel gain is random with a zero-mean Gaussian prior of
variance sigma2 (< 1, in noise-variance units) and the asymptotic MSE
references become prior expectations of the pointwise bounds, evaluated by
Gauss-Hermite quadrature in the log domain. The prior expectation of 1/phi
is finite only for sigma2 < 1; at sigma2 >= 1 the tail growth of 1/phi beats
the prior and the expected bound diverges, so those inputs are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.special import logsumexp

from .errors import QuadratureError, SingularFisherError
from .kernels import log_phi, phi_pair

LN2 = math.log(2.0)
DB_PER_LOG = 10.0 / math.log(10.0)
HALF_LOG_PI = 0.5 * math.log(math.pi)

# Determinants at or below this are treated as singular rather than inverted,
# so sweeps over extreme offsets fail loudly instead of emitting garbage.
DET_FLOOR = 1e-300

_LOG_MAX_DOUBLE = math.log(1.7976931348623157e308)


@dataclass(frozen=True)
class SystemPoint:
    """A (zeta, alpha) parameter pair plus the sample count the bound refers to."""

    zeta: float
    alpha: float
    n: int

    def __post_init__(self):
        if self.n < 2 or self.n % 2:
            raise ValueError(f"sample count must be even and >= 2, got {self.n}")
        if not (math.isfinite(self.zeta) and math.isfinite(self.alpha)):
            raise ValueError("zeta and alpha must be finite")


class FisherMatrix(NamedTuple):
    """Entries of the symmetric 2x2 information matrix for (zeta, alpha)."""

    f_zz: float
    f_za: float
    f_aa: float

    def det(self) -> float:
        return self.f_zz * self.f_aa - self.f_za * self.f_za


class LossReport(NamedTuple):
    """Quantization losses with the offset unknown (chi) and known (chi_star)."""

    chi: float
    chi_star: float
    chi_db: float
    chi_star_db: float


class HybridBounds(NamedTuple):
    """Asymptotic MSE references of the hybrid setup for one offset."""

    mse_y: float
    mse_r: float
    mse_r_star: float


@dataclass(frozen=True)
class HybridPrior:
    """Zero-mean Gaussian prior on the channel gain with variance sigma2."""

    sigma2: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0.0):
            raise ValueError(f"prior variance must be positive and finite, got {self.sigma2!r}")


@lru_cache(maxsize=16)
def _gauss_hermite(order: int):
    """Symmetrized Gauss-Hermite nodes and log-weights (physicists' convention)."""
    u, w = np.polynomial.hermite.hermgauss(order)
    # Enforce exact +/- node symmetry; the two-sided consistency check in
    # psi_h assumes the node set is closed under negation.
    u = 0.5 * (u - u[::-1])
    w = 0.5 * (w + w[::-1])
    logw = np.log(w)
    u.setflags(write=False)
    logw.setflags(write=False)
    return u, logw


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Hermite order for prior expectations, with the pairing tolerance.

    The default order 80 resolves every expectation on the shipped sweep
    grids to near machine precision; orders below 20 are rejected because
    the 1/phi integrand grows too fast in the tails for them to be credible.
    """

    order: int = 80
    pair_rtol: float = 1e-6

    def __post_init__(self):
        if self.order < 20:
            raise ValueError(f"quadrature order must be >= 20, got {self.order}")

    def nodes(self):
        return _gauss_hermite(self.order)


def fisher_ideal(point: SystemPoint) -> float:
    """Fisher information of the unquantized receiver: exactly N."""
    return float(point.n)


def fisher_1bit(point: SystemPoint) -> FisherMatrix:
    """Closed-form 2x2 information matrix of the 1-bit receiver."""
    pp, pm = phi_pair(point.zeta, point.alpha)
    half = 0.5 * point.n
    diag = half * (pp + pm)
    return FisherMatrix(f_zz=diag, f_za=half * (pp - pm), f_aa=diag)


def crlb_1bit_unknown(point: SystemPoint) -> float:
    """Channel-gain CRLB of the 1-bit receiver with the offset unknown.

    This is the (zeta, zeta) entry of the inverse information matrix,
    F_aa / (F_zz * F_aa - F_za**2); algebraically it equals
    (1/phi_plus + 1/phi_minus) / (2N).
    """
    fm = fisher_1bit(point)
    det = fm.det()
    if not det > DET_FLOOR:
        raise SingularFisherError(
            f"singular 1-bit Fisher matrix (det={det:.3e}) at "
            f"zeta={point.zeta:g}, alpha={point.alpha:g}, n={point.n}"
        )
    return fm.f_aa / det


def crlb_1bit_known(point: SystemPoint) -> float:
    """Channel-gain CRLB of the 1-bit receiver with the offset known: 1/F_zz."""
    fm = fisher_1bit(point)
    if not fm.f_zz > DET_FLOOR:
        raise SingularFisherError(
            f"degenerate 1-bit Fisher information (F_zz={fm.f_zz:.3e}) at "
            f"zeta={point.zeta:g}, alpha={point.alpha:g}, n={point.n}"
        )
    return 1.0 / fm.f_zz


def loss_deterministic(zeta: float, alpha: float) -> LossReport:
    """Quantization losses of the deterministic setup at one (zeta, alpha).

    chi (offset unknown) is the harmonic mean of the two per-symbol
    densities, chi_star (offset known) their arithmetic mean. Both are
    sample-count free. Computed in the log domain so the dB figures stay
    finite even where the linear values underflow.
    """
    lp = log_phi(alpha + zeta)
    lm = log_phi(alpha - zeta)
    lsum = float(np.logaddexp(lp, lm))
    log_chi = LN2 + lp + lm - lsum
    log_chi_star = lsum - LN2
    return LossReport(
        chi=math.exp(log_chi),
        chi_star=math.exp(log_chi_star),
        chi_db=DB_PER_LOG * log_chi,
        chi_star_db=DB_PER_LOG * log_chi_star,
    )


def _require_proper_prior(prior: HybridPrior) -> None:
    if prior.sigma2 >= 1.0:
        raise ValueError(
            f"prior variance {prior.sigma2:g} >= 1 (noise variance): the prior "
            "expectation of the 1-bit bound diverges, no finite value exists"
        )


def _log_expect_inv_phi(alpha: float, prior: HybridPrior, quad: QuadratureSpec, sign: float) -> float:
    """log E[1/phi(alpha + sign*zeta)] under the Gaussian prior, via GH nodes."""
    u, logw = quad.nodes()
    scale = math.sqrt(2.0 * prior.sigma2)
    vals = np.array([logw[i] - log_phi(alpha + sign * scale * u[i]) for i in range(u.size)])
    return float(logsumexp(vals)) - HALF_LOG_PI


def psi_h(alpha: float, prior: HybridPrior, quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Prior expectation of 1/phi, the scale factor of the hybrid 1-bit bound.

    E[1/phi(alpha - zeta)] and E[1/phi(alpha + zeta)] are equal for the
    symmetric prior; both are evaluated and required to agree within
    ``quad.pair_rtol``, and their mean is returned. Disagreement signals a
    quadrature rule too coarse (or internally inconsistent) for this
    (alpha, sigma2) and raises ``QuadratureError``.
    """
    _require_proper_prior(prior)
    log_plus = _log_expect_inv_phi(alpha, prior, quad, +1.0)
    log_minus = _log_expect_inv_phi(alpha, prior, quad, -1.0)
    if max(log_plus, log_minus) > _LOG_MAX_DOUBLE:
        raise QuadratureError(
            f"prior expectation of 1/phi overflows double range at "
            f"alpha={alpha:g}, sigma2={prior.sigma2:g}"
        )
    plus = math.exp(log_plus)
    minus = math.exp(log_minus)
    mean = 0.5 * (plus + minus)
    if abs(plus - minus) > quad.pair_rtol * mean:
        raise QuadratureError(
            f"two-sided expectation mismatch ({plus:.6e} vs {minus:.6e}) at "
            f"alpha={alpha:g}, sigma2={prior.sigma2:g}, order={quad.order}; "
            "increase the quadrature order"
        )
    return mean


def _expect_inv_density_sum(alpha: float, prior: HybridPrior, quad: QuadratureSpec) -> float:
    """E[1/(phi_plus + phi_minus)] under the Gaussian prior."""
    _require_proper_prior(prior)
    u, logw = quad.nodes()
    scale = math.sqrt(2.0 * prior.sigma2)
    vals = np.empty(u.size)
    for i in range(u.size):
        t = scale * u[i]
        vals[i] = logw[i] - np.logaddexp(log_phi(alpha + t), log_phi(alpha - t))
    log_out = float(logsumexp(vals)) - HALF_LOG_PI
    if log_out > _LOG_MAX_DOUBLE:
        raise QuadratureError(
            f"prior expectation of 1/(phi_plus + phi_minus) overflows double "
            f"range at alpha={alpha:g}, sigma2={prior.sigma2:g}"
        )
    return math.exp(log_out)


def hybrid_bounds(
    alpha: float, prior: HybridPrior, n: int, quad: QuadratureSpec = QuadratureSpec()
) -> HybridBounds:
    """Asymptotic MSE references of the hybrid setup for sample count ``n``.

    mse_y = 1/N for the ideal receiver (the prior expectation of 1/N is
    itself), mse_r = psi_h/N for the 1-bit receiver with unknown offset, and
    mse_r_star = (2/N) * E[1/(phi_plus + phi_minus)] with the offset known.
    """
    if n < 2 or n % 2:
        raise ValueError(f"sample count must be even and >= 2, got {n}")
    return HybridBounds(
        mse_y=1.0 / n,
        mse_r=psi_h(alpha, prior, quad) / n,
        mse_r_star=2.0 * _expect_inv_density_sum(alpha, prior, quad) / n,
    )


def loss_hybrid(
    alpha: float, prior: HybridPrior, quad: QuadratureSpec = QuadratureSpec()
) -> LossReport:
    """Quantization losses of the hybrid setup at one offset.

    chi = 1/psi_h and chi_star = 1/(2 E[1/(phi_plus + phi_minus)]), i.e. the
    ratios mse_y/mse_r and mse_y/mse_r_star of :func:`hybrid_bounds`.
    """
    psi = psi_h(alpha, prior, quad)
    einv = _expect_inv_density_sum(alpha, prior, quad)
    chi = 1.0 / psi
    chi_star = 1.0 / (2.0 * einv)
    return LossReport(
        chi=chi,
        chi_star=chi_star,
        chi_db=-DB_PER_LOG * math.log(psi),
        chi_star_db=-DB_PER_LOG * math.log(2.0 * einv),
    )
