"""Pydantic request/response models shared by the HTTP service and the CLI.

Requests accept SNR in dB as a convenience; the handlers resolve it to a
channel gain (deterministic, dB/20) or a prior variance (hybrid, dB/10) and
echo the resolved value back, so clients always see the parameters that were
actually used.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

Mode = Literal["deterministic", "hybrid"]
Receiver = Literal["ideal", "onebit_unknown", "onebit_known"]
LossKind = Literal["chi", "chi_star"]
TableFormat = Literal["paper_txt", "csv", "json"]


class BoundsRequest(BaseModel):
    zeta: float
    alpha: float
    n: int = Field(ge=2)

    @model_validator(mode="after")
    def _even_n(self):
        if self.n % 2:
            raise ValueError("n must be even")
        return self


class FisherEntries(BaseModel):
    f_zz: float
    f_za: float
    f_aa: float


class BoundsResponse(BaseModel):
    zeta: float
    alpha: float
    n: int
    fisher_ideal: float
    crlb_ideal: float
    fisher_onebit: FisherEntries
    crlb_onebit_unknown: float
    crlb_onebit_known: float


class LossRequest(BaseModel):
    mode: Mode
    alpha: float
    snr_db: Optional[float] = None
    zeta: Optional[float] = None
    sigma2: Optional[float] = None
    quad_order: int = Field(default=80, ge=20)

    @model_validator(mode="after")
    def _one_scale(self):
        if self.mode == "deterministic":
            given = [v for v in (self.snr_db, self.zeta) if v is not None]
            if len(given) != 1 or self.sigma2 is not None:
                raise ValueError("deterministic loss takes exactly one of snr_db or zeta")
        else:
            given = [v for v in (self.snr_db, self.sigma2) if v is not None]
            if len(given) != 1 or self.zeta is not None:
                raise ValueError("hybrid loss takes exactly one of snr_db or sigma2")
        return self


class LossResponse(BaseModel):
    mode: Mode
    alpha: float
    zeta: Optional[float] = None
    sigma2: Optional[float] = None
    chi: float
    chi_star: float
    chi_db: float
    chi_star_db: float


class SweepRequest(BaseModel):
    mode: Mode
    kind: LossKind = "chi"
    alpha_min: float = 0.0
    alpha_max: float = 1.0
    alpha_step: float = Field(default=0.05, gt=0.0)
    snr_db: list[float] = Field(default=[-25.0, -10.0, -5.0, -2.5], min_length=1)
    quad_order: int = Field(default=80, ge=20)

    @model_validator(mode="after")
    def _ordered(self):
        if self.alpha_max < self.alpha_min:
            raise ValueError("alpha_max must be >= alpha_min")
        return self


class SweepResponse(BaseModel):
    kind: list[str]
    alpha_grid: list[float]
    snr_db: list[float]
    values_db: list[list[float]]


class SimulateRequest(BaseModel):
    mode: Mode
    receiver: Receiver
    alpha: float = 0.0
    n: int = Field(ge=2)
    trials: int = Field(default=1000, ge=1)
    seed: int = 0
    snr_db: Optional[float] = None
    zeta: Optional[float] = None
    sigma2: Optional[float] = None
    pilot_layout: Literal["alternating", "block", "shuffled"] = "alternating"
    pilot_seed: int = 0
    quad_order: int = Field(default=80, ge=20)
    workers: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _consistent(self):
        if self.n % 2:
            raise ValueError("n must be even")
        if self.mode == "deterministic":
            given = [v for v in (self.snr_db, self.zeta) if v is not None]
            if len(given) != 1 or self.sigma2 is not None:
                raise ValueError("deterministic simulation takes exactly one of snr_db or zeta")
        else:
            given = [v for v in (self.snr_db, self.sigma2) if v is not None]
            if len(given) != 1 or self.zeta is not None:
                raise ValueError("hybrid simulation takes exactly one of snr_db or sigma2")
        return self


class SimulateConfigEcho(BaseModel):
    """Experiment parameters as resolved; excludes execution details like workers."""

    mode: Mode
    receiver: Receiver
    zeta: Optional[float] = None
    sigma2: Optional[float] = None
    alpha: float
    n: int
    trials: int
    master_seed: int
    pilot_layout: str
    pilot_seed: int
    quad_order: int


class SimulateResult(BaseModel):
    mse_zeta: float
    mse_alpha: Optional[float] = None
    crlb_ref: float
    efficiency: float
    ci95_halfwidth: float
    clamp_rate: float
    trials_run: int
    failures: int


class SimulateResponse(BaseModel):
    config: SimulateConfigEcho
    version: str
    result: SimulateResult


class SelftestCheck(BaseModel):
    name: str
    passed: bool
    detail: str


class SelftestResponse(BaseModel):
    passed: bool
    checks: list[SelftestCheck]


class HealthResponse(BaseModel):
    status: str


class VersionResponse(BaseModel):
    version: str
