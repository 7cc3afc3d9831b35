"""Monte Carlo harness for verifying the asymptotic bounds empirically.

Each trial derives its own random substream from (master seed, trial index),
so results are bit-identical no matter how trials are distributed over
worker processes. Per-trial squared errors are written into arrays indexed
by trial and reduced with numpy's pairwise summation, which keeps the final
figures independent of completion order as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .bounds import (
    HybridPrior,
    QuadratureSpec,
    SystemPoint,
    crlb_1bit_known,
    crlb_1bit_unknown,
    hybrid_bounds,
)
from .errors import ConvergenceError, ExperimentError
from .estimators import (
    SolverOptions,
    ideal_map,
    ideal_mle,
    onebit_jmapmle,
    onebit_jmle,
    onebit_mle_known_alpha,
)
from .signal_model import PILOT_LAYOUTS, count_stats, make_pilot, quantize, synth_ideal

MODES = ("deterministic", "hybrid")
RECEIVERS = ("ideal", "onebit_unknown", "onebit_known")

# Experiments abort when more than this fraction of trials fail to converge.
MAX_FAILURE_FRACTION = 0.01


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one Monte Carlo experiment.

    Deterministic mode requires ``zeta``; hybrid mode requires ``sigma2``
    (the prior variance the channel gain is drawn from every trial).
    ``workers`` controls execution only and never affects the numbers.
    """

    mode: str
    receiver: str
    alpha: float
    n: int
    trials: int
    master_seed: int
    zeta: float | None = None
    sigma2: float | None = None
    pilot_layout: str = "alternating"
    pilot_seed: int = 0
    solver: SolverOptions = field(default_factory=SolverOptions)
    quad_order: int = 80
    workers: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.receiver not in RECEIVERS:
            raise ValueError(f"receiver must be one of {RECEIVERS}, got {self.receiver!r}")
        if self.pilot_layout not in PILOT_LAYOUTS:
            raise ValueError(f"pilot_layout must be one of {PILOT_LAYOUTS}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.n < 2 or self.n % 2:
            raise ValueError(f"n must be even and >= 2, got {self.n}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.mode == "deterministic":
            if self.zeta is None:
                raise ValueError("deterministic mode requires zeta")
        else:
            if self.sigma2 is None:
                raise ValueError("hybrid mode requires sigma2 (prior variance)")
            if self.sigma2 <= 0.0:
                raise ValueError(f"sigma2 must be positive, got {self.sigma2}")


@dataclass(frozen=True)
class McResult:
    """Empirical errors of one experiment against the matching bound.

    ``mse_alpha`` is present only for the joint receiver, where the offset
    is actually estimated. ``ci95_halfwidth`` is a normal-approximation
    confidence halfwidth on ``mse_zeta`` from the trial variance of squared
    errors; it is meaningful from around a thousand trials up.
    ``clamp_rate`` is the fraction of (successful) trials whose empirical
    frequencies hit the degenerate-count clamp.
    """

    mse_zeta: float
    mse_alpha: float | None
    crlb_ref: float
    efficiency: float
    ci95_halfwidth: float
    clamp_rate: float
    trials_run: int
    failures: int


def _crlb_reference(cfg: ExperimentConfig) -> float:
    if cfg.mode == "deterministic":
        if cfg.receiver == "ideal":
            return 1.0 / cfg.n
        point = SystemPoint(cfg.zeta, cfg.alpha, cfg.n)
        if cfg.receiver == "onebit_unknown":
            return crlb_1bit_unknown(point)
        return crlb_1bit_known(point)
    prior = HybridPrior(cfg.sigma2)
    if cfg.receiver == "ideal":
        return 1.0 / cfg.n
    hb = hybrid_bounds(cfg.alpha, prior, cfg.n, QuadratureSpec(cfg.quad_order))
    return hb.mse_r if cfg.receiver == "onebit_unknown" else hb.mse_r_star


def _run_trial(cfg: ExperimentConfig, pilot, trial: int) -> tuple[float, float, bool, bool]:
    """One trial: (squared zeta error, squared alpha error, clamped, failed)."""
    rng = np.random.default_rng(np.random.SeedSequence((cfg.master_seed, trial)))
    if cfg.mode == "deterministic":
        zeta = cfg.zeta
    else:
        zeta = math.sqrt(cfg.sigma2) * rng.standard_normal()
    y = synth_ideal(pilot, zeta, rng)

    clamped = False
    sq_alpha = math.nan
    try:
        if cfg.receiver == "ideal":
            if cfg.mode == "deterministic":
                est = ideal_mle(y, pilot)
            else:
                est = ideal_map(y, pilot, HybridPrior(cfg.sigma2))
            zeta_hat = est
        else:
            counts = count_stats(quantize(y, cfg.alpha), pilot)
            if cfg.receiver == "onebit_known":
                joint = onebit_mle_known_alpha(counts, cfg.alpha, cfg.solver)
            elif cfg.mode == "deterministic":
                joint = onebit_jmle(counts)
            else:
                joint = onebit_jmapmle(counts, HybridPrior(cfg.sigma2), cfg.solver)
            zeta_hat = joint.zeta_hat
            clamped = joint.clamped
            if cfg.receiver == "onebit_unknown":
                sq_alpha = (joint.alpha_hat - cfg.alpha) ** 2
    except ConvergenceError:
        return math.nan, math.nan, clamped, True
    return (zeta_hat - zeta) ** 2, sq_alpha, clamped, False


def _trial_batch(args) -> list[tuple[float, float, bool, bool]]:
    cfg, pilot, trials = args
    return [_run_trial(cfg, pilot, t) for t in trials]


def run_monte_carlo(cfg: ExperimentConfig) -> McResult:
    """Run one experiment and compare the empirical MSE to its bound.

    Raises ``ExperimentError`` when more than ``MAX_FAILURE_FRACTION`` of
    trials fail to converge; results are otherwise computed over the
    successful trials.
    """
    pilot = make_pilot(
        cfg.n,
        cfg.pilot_layout,
        seed=cfg.pilot_seed if cfg.pilot_layout == "shuffled" else None,
    )
    crlb_ref = _crlb_reference(cfg)

    indices = list(range(cfg.trials))
    if cfg.workers == 1:
        rows = [_run_trial(cfg, pilot, t) for t in indices]
    else:
        chunk = max(1, cfg.trials // (cfg.workers * 8))
        batches = [
            (cfg, pilot, indices[i : i + chunk]) for i in range(0, cfg.trials, chunk)
        ]
        rows = []
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for batch in pool.map(_trial_batch, batches):
                rows.extend(batch)

    sq_zeta = np.array([r[0] for r in rows])
    sq_alpha = np.array([r[1] for r in rows])
    clamped = np.array([r[2] for r in rows])
    failed = np.array([r[3] for r in rows])

    failures = int(np.count_nonzero(failed))
    if failures > MAX_FAILURE_FRACTION * cfg.trials:
        raise ExperimentError(
            f"{failures}/{cfg.trials} trials failed to converge "
            f"(limit {MAX_FAILURE_FRACTION:.0%})"
        )
    ok = ~failed
    n_ok = int(np.count_nonzero(ok))
    sq_ok = sq_zeta[ok]
    mse_zeta = float(np.sum(sq_ok)) / n_ok
    ci95 = (
        1.96 * float(np.std(sq_ok, ddof=1)) / math.sqrt(n_ok) if n_ok > 1 else 0.0
    )
    if cfg.receiver == "onebit_unknown":
        mse_alpha = float(np.sum(sq_alpha[ok])) / n_ok
    else:
        mse_alpha = None
    return McResult(
        mse_zeta=mse_zeta,
        mse_alpha=mse_alpha,
        crlb_ref=crlb_ref,
        efficiency=mse_zeta / crlb_ref,
        ci95_halfwidth=ci95,
        clamp_rate=float(np.count_nonzero(clamped & ok)) / n_ok,
        trials_run=n_ok,
        failures=failures,
    )
