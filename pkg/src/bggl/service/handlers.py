"""Request handlers: thin adapters from schema models to the core library.

They raise :class:`bggl.errors.BgglError` subclasses on data or model
problems; callers map those to HTTP statuses or exit codes.
"""

from __future__ import annotations

import io

import numpy as np

from .. import asympt, finance, montecarlo
from ..estimate import Regime, fit_bggl
from ..params import PairedSample
from ..sample import RngStream, draw_pairs, sample_levy_path
from . import schemas as s


def sample(req: s.SampleRequest) -> s.SampleResponse:
    x, y = draw_pairs(req.theta.to_params(), req.n, RngStream(req.seed))
    return s.SampleResponse(x=x.tolist(), y=y.tolist())


def fit(req: s.FitRequest) -> s.FitResponse:
    result = fit_bggl(PairedSample(req.x, req.y), boundary_tol=req.boundary_tol)
    return s.FitResponse.model_validate(result.to_dict())


def table1(req: s.Table1Request) -> s.Table1Response:
    reports = montecarlo.run_table1_suite(req.seed, replications=req.replications, workers=req.workers)
    return s.Table1Response(
        reports=[r.to_dict() for r in reports],
        text=montecarlo.suite_to_text(reports),
    )


def run_finance(req: s.FinanceRequest) -> s.FinanceResponse:
    series = finance.read_vol_csv(io.StringIO(req.csv_text), aggregate_daily=req.aggregate_daily)
    return s.FinanceResponse.model_validate(finance.run_pipeline(series).to_dict())


def qq(req: s.QQRequest) -> s.QQModel:
    if req.law == "gamma":
        law = finance.GammaLaw(req.theta.alpha, req.theta.beta)
    elif req.law == "gal":
        law = finance.GalLaw(req.theta.to_params())
    else:
        law = finance.NormalLaw(req.loc, req.scale)
    data = finance.qq_data(req.values, law)
    return s.QQModel(theoretical=data.theoretical.tolist(), empirical=data.empirical.tolist())


def levy_path(req: s.LevyPathRequest) -> s.LevyPathResponse:
    times = np.linspace(0.0, req.t_max, req.steps + 1)
    path = sample_levy_path(req.theta.to_params(), times, RngStream(req.seed))
    return s.LevyPathResponse(times=path.times.tolist(), g=path.g.tolist(), w=path.w.tolist())


def _plain(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, dict):
        return {k: _plain(u) for k, u in v.items()}
    return v


def limit_law(req: s.LimitLawRequest) -> s.LimitLawResponse:
    theta = req.theta.to_params()
    spec = (
        asympt.LimitLawSpec(Regime(req.regime), theta.alpha)
        if req.regime
        else asympt.LimitLawSpec.for_theta(theta)
    )
    draws = asympt.sample_limit_vector(spec, theta, RngStream(req.seed), size=req.size)
    return s.LimitLawResponse(
        regime=spec.regime.value,
        components=["alpha", "beta", "delta", "mu", "upsilon"],
        draws=draws.tolist(),
        law=_plain(spec.describe(theta)),
    )


def rate_slope(req: s.RateSlopeRequest) -> s.RateSlopeResponse:
    theta = req.theta.to_params()
    res = asympt.rate_slope_fit(theta, req.n_grid, req.replications, RngStream(req.seed))
    return s.RateSlopeResponse(
        slope=res.slope,
        theoretical_slope=asympt.theoretical_rate_slope(theta.alpha),
        n_grid=res.n_grid.tolist(),
        rmse=res.rmse.tolist(),
    )


# command -> (request model, response model, handler)
HANDLERS = {
    "sample": (s.SampleRequest, s.SampleResponse, sample),
    "fit": (s.FitRequest, s.FitResponse, fit),
    "table1": (s.Table1Request, s.Table1Response, table1),
    "finance": (s.FinanceRequest, s.FinanceResponse, run_finance),
    "qq": (s.QQRequest, s.QQModel, qq),
    "levy-path": (s.LevyPathRequest, s.LevyPathResponse, levy_path),
    "limit-law": (s.LimitLawRequest, s.LimitLawResponse, limit_law),
    "rate-slope": (s.RateSlopeRequest, s.RateSlopeResponse, rate_slope),
}
