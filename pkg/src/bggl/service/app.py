"""HTTP front end. One POST endpoint per CLI command, plus /health."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import BgglError
from . import handlers
from . import schemas as s

app = FastAPI(title="bggl", version=__version__)


@app.exception_handler(BgglError)
async def _model_error(request: Request, exc: BgglError):
    return JSONResponse(status_code=400, content={"detail": str(exc), "error": type(exc).__name__})


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/sample", response_model=s.SampleResponse)
def sample(req: s.SampleRequest):
    return handlers.sample(req)


@app.post("/fit", response_model=s.FitResponse)
def fit(req: s.FitRequest):
    return handlers.fit(req)


@app.post("/table1", response_model=s.Table1Response)
def table1(req: s.Table1Request):
    return handlers.table1(req)


@app.post("/finance", response_model=s.FinanceResponse)
def finance(req: s.FinanceRequest):
    return handlers.run_finance(req)


@app.post("/qq", response_model=s.QQModel)
def qq(req: s.QQRequest):
    return handlers.qq(req)


@app.post("/levy-path", response_model=s.LevyPathResponse)
def levy_path(req: s.LevyPathRequest):
    return handlers.levy_path(req)


@app.post("/limit-law", response_model=s.LimitLawResponse)
def limit_law(req: s.LimitLawRequest):
    return handlers.limit_law(req)


@app.post("/rate-slope", response_model=s.RateSlopeResponse)
def rate_slope(req: s.RateSlopeRequest):
    return handlers.rate_slope(req)
