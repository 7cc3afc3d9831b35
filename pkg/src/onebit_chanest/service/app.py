"""FastAPI application exposing the bounds, losses, sweeps and simulations."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__, version_string
from ..errors import ExperimentError, QuadratureError, SingularFisherError
from . import handlers, schemas

_NUMERICAL_FAILURES = (SingularFisherError, QuadratureError, ExperimentError, ValueError)


def create_app() -> FastAPI:
    app = FastAPI(
        title="onebit-chanest",
        description=(
            "Estimation limits and Monte Carlo experiments for pilot-based "
            "channel estimation behind a 1-bit ADC with an unknown offset."
        ),
        version=__version__,
    )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok")

    @app.get("/version", response_model=schemas.VersionResponse)
    def version():
        return schemas.VersionResponse(version=version_string())

    @app.post("/bounds", response_model=schemas.BoundsResponse)
    def bounds(req: schemas.BoundsRequest):
        try:
            return handlers.compute_bounds(req)
        except _NUMERICAL_FAILURES as err:
            raise HTTPException(status_code=400, detail=str(err))

    @app.post("/loss", response_model=schemas.LossResponse)
    def loss(req: schemas.LossRequest):
        try:
            return handlers.compute_loss(req)
        except _NUMERICAL_FAILURES as err:
            raise HTTPException(status_code=400, detail=str(err))

    @app.post("/sweep", response_model=schemas.SweepResponse)
    def sweep(req: schemas.SweepRequest):
        try:
            return handlers.compute_sweep(req)
        except _NUMERICAL_FAILURES as err:
            raise HTTPException(status_code=400, detail=str(err))

    @app.post("/simulate", response_model=schemas.SimulateResponse)
    def simulate(req: schemas.SimulateRequest):
        try:
            return handlers.run_simulation(req)
        except _NUMERICAL_FAILURES as err:
            raise HTTPException(status_code=400, detail=str(err))

    @app.post("/selftest", response_model=schemas.SelftestResponse)
    def selftest():
        return handlers.run_selftest_checks()

    return app


app = create_app()
