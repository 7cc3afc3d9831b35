"""Request handlers: the single execution path behind both HTTP and CLI.

Each handler takes a validated request model and returns a response model.
Numerical failures propagate as the package's own exception types; the app
maps them onto HTTP status codes and the CLI onto exit codes.
"""

from __future__ import annotations

from .. import version_string
from ..bounds import (
    HybridPrior,
    QuadratureSpec,
    SystemPoint,
    crlb_1bit_known,
    crlb_1bit_unknown,
    fisher_1bit,
    fisher_ideal,
    loss_deterministic,
    loss_hybrid,
)
from ..montecarlo import ExperimentConfig, run_monte_carlo
from ..oracles import run_selftest
from ..sweep import make_alpha_grid, snr_db_to_sigma2, snr_db_to_zeta, sweep_loss
from . import schemas


def compute_bounds(req: schemas.BoundsRequest) -> schemas.BoundsResponse:
    point = SystemPoint(req.zeta, req.alpha, req.n)
    fm = fisher_1bit(point)
    return schemas.BoundsResponse(
        zeta=req.zeta,
        alpha=req.alpha,
        n=req.n,
        fisher_ideal=fisher_ideal(point),
        crlb_ideal=1.0 / req.n,
        fisher_onebit=schemas.FisherEntries(f_zz=fm.f_zz, f_za=fm.f_za, f_aa=fm.f_aa),
        crlb_onebit_unknown=crlb_1bit_unknown(point),
        crlb_onebit_known=crlb_1bit_known(point),
    )


def compute_loss(req: schemas.LossRequest) -> schemas.LossResponse:
    if req.mode == "deterministic":
        zeta = req.zeta if req.zeta is not None else snr_db_to_zeta(req.snr_db)
        report = loss_deterministic(zeta, req.alpha)
        return schemas.LossResponse(
            mode=req.mode, alpha=req.alpha, zeta=zeta,
            chi=report.chi, chi_star=report.chi_star,
            chi_db=report.chi_db, chi_star_db=report.chi_star_db,
        )
    sigma2 = req.sigma2 if req.sigma2 is not None else snr_db_to_sigma2(req.snr_db)
    report = loss_hybrid(req.alpha, HybridPrior(sigma2), QuadratureSpec(req.quad_order))
    return schemas.LossResponse(
        mode=req.mode, alpha=req.alpha, sigma2=sigma2,
        chi=report.chi, chi_star=report.chi_star,
        chi_db=report.chi_db, chi_star_db=report.chi_star_db,
    )


def compute_sweep(req: schemas.SweepRequest) -> schemas.SweepResponse:
    grid = make_alpha_grid(req.alpha_min, req.alpha_max, req.alpha_step)
    table = sweep_loss(
        (req.kind, req.mode), grid, req.snr_db, QuadratureSpec(req.quad_order)
    )
    return schemas.SweepResponse(
        kind=list(table.kind),
        alpha_grid=table.alpha_grid.tolist(),
        snr_db=table.snr_db.tolist(),
        values_db=table.values_db.tolist(),
    )


def run_simulation(req: schemas.SimulateRequest) -> schemas.SimulateResponse:
    if req.mode == "deterministic":
        zeta = req.zeta if req.zeta is not None else snr_db_to_zeta(req.snr_db)
        sigma2 = None
    else:
        zeta = None
        sigma2 = req.sigma2 if req.sigma2 is not None else snr_db_to_sigma2(req.snr_db)
    cfg = ExperimentConfig(
        mode=req.mode,
        receiver=req.receiver,
        alpha=req.alpha,
        n=req.n,
        trials=req.trials,
        master_seed=req.seed,
        zeta=zeta,
        sigma2=sigma2,
        pilot_layout=req.pilot_layout,
        pilot_seed=req.pilot_seed,
        quad_order=req.quad_order,
        workers=req.workers,
    )
    res = run_monte_carlo(cfg)
    return schemas.SimulateResponse(
        config=schemas.SimulateConfigEcho(
            mode=req.mode,
            receiver=req.receiver,
            zeta=zeta,
            sigma2=sigma2,
            alpha=req.alpha,
            n=req.n,
            trials=req.trials,
            master_seed=req.seed,
            pilot_layout=req.pilot_layout,
            pilot_seed=req.pilot_seed,
            quad_order=req.quad_order,
        ),
        version=version_string(),
        result=schemas.SimulateResult(
            mse_zeta=res.mse_zeta,
            mse_alpha=res.mse_alpha,
            crlb_ref=res.crlb_ref,
            efficiency=res.efficiency,
            ci95_halfwidth=res.ci95_halfwidth,
            clamp_rate=res.clamp_rate,
            trials_run=res.trials_run,
            failures=res.failures,
        ),
    )


def run_selftest_checks() -> schemas.SelftestResponse:
    checks = [
        schemas.SelftestCheck(name=c.name, passed=c.passed, detail=c.detail)
        for c in run_selftest()
    ]
    return schemas.SelftestResponse(passed=all(c.passed for c in checks), checks=checks)
