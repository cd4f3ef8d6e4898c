"""Request and response models shared by the HTTP service and the CLI."""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..params import BgglParams

DEFAULT_SEED = 20240917
U64_MAX = 2**64 - 1


class Theta(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(gt=0, allow_inf_nan=False)
    beta: float = Field(gt=0, allow_inf_nan=False)
    delta: float = Field(0.0, allow_inf_nan=False)
    mu: float = Field(0.0, allow_inf_nan=False)
    sigma: float = Field(1.0, gt=0, allow_inf_nan=False)

    def to_params(self) -> BgglParams:
        return BgglParams(self.alpha, self.beta, self.delta, self.mu, self.sigma)


Seed = Field(DEFAULT_SEED, ge=0, le=U64_MAX)


class SampleRequest(BaseModel):
    theta: Theta
    n: int = Field(ge=1, le=10_000_000)
    seed: int = Seed


class SampleResponse(BaseModel):
    x: list[float]
    y: list[float]


class FitRequest(BaseModel):
    x: list[float] = Field(min_length=2)
    y: list[float] = Field(min_length=2)
    boundary_tol: float = Field(0.02, ge=0)

    @model_validator(mode="after")
    def _same_length(self):
        if len(self.x) != len(self.y):
            raise ValueError("x and y must have equal lengths")
        return self


class FitResponse(BaseModel):
    theta_hat: dict[str, Optional[float]]
    upsilon_hat: float
    s2: Optional[float]
    n: int
    regime: Literal["regular", "boundary", "heavy"]
    d_n: list[float]
    asympt_cov: dict[str, Any]
    degenerate_flags: list[str]


class Table1Request(BaseModel):
    seed: int = Seed
    replications: int = Field(5000, ge=1)
    workers: int = Field(1, ge=1, le=64)


class StudyRowModel(BaseModel):
    param: str
    actual: float
    mean: float
    variance: float
    rmse: float
    mae: float
    se_mean: float


class StudyReportModel(BaseModel):
    config: dict[str, Any]
    rows: list[StudyRowModel]
    degenerate_count: int


class Table1Response(BaseModel):
    reports: list[StudyReportModel]
    text: str


class FinanceRequest(BaseModel):
    csv_text: str
    aggregate_daily: bool = False


class QQModel(BaseModel):
    theoretical: list[float]
    empirical: list[float]


class FinanceResponse(BaseModel):
    ar1: dict[str, float]
    n: int
    fit: FitResponse
    residual_mean: Optional[float]
    residual_var: Optional[float]
    qq: dict[str, Optional[QQModel]]


class QQRequest(BaseModel):
    values: list[float] = Field(min_length=2)
    law: Literal["gamma", "gal", "normal"]
    theta: Optional[Theta] = None
    loc: float = 0.0
    scale: float = Field(1.0, gt=0)

    @model_validator(mode="after")
    def _law_params(self):
        if self.law in ("gamma", "gal") and self.theta is None:
            raise ValueError(f"law {self.law!r} needs theta")
        return self


class LevyPathRequest(BaseModel):
    theta: Theta
    t_max: float = Field(1.0, gt=0)
    steps: int = Field(1000, ge=1, le=10_000_000)
    seed: int = Seed


class LevyPathResponse(BaseModel):
    times: list[float]
    g: list[float]
    w: list[float]


class LimitLawRequest(BaseModel):
    theta: Theta
    size: int = Field(1000, ge=1, le=10_000_000)
    regime: Optional[Literal["regular", "boundary", "heavy"]] = None
    seed: int = Seed


class LimitLawResponse(BaseModel):
    regime: Literal["regular", "boundary", "heavy"]
    components: list[str]
    draws: list[list[float]]
    law: dict[str, Any]


class RateSlopeRequest(BaseModel):
    theta: Theta
    n_grid: list[int] = Field(default_factory=lambda: [200, 800, 3200, 12800], min_length=3)
    replications: int = Field(2000, ge=2)
    seed: int = Seed


class RateSlopeResponse(BaseModel):
    slope: float
    theoretical_slope: float
    n_grid: list[int]
    rmse: list[float]
