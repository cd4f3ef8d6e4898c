"""Command-line client.

Each command builds a request model and either runs the matching handler
in-process or, with ``--url``, posts it to a running service. Exit codes:
0 on success, 2 on usage errors, 1 on data or model errors (one-line
diagnostic on stderr).

When ``--seed`` is omitted it defaults to 20240917.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import pandas as pd
from pydantic import BaseModel, ValidationError

from . import __version__
from .errors import BgglError, DataFormatError
from .service import schemas as s
from .service.handlers import HANDLERS

PROG = "bggl"


class UsageError(Exception):
    pass


class RemoteError(Exception):
    def __init__(self, message: str, status: int):
        super().__init__(message)
        self.status = status


# -- argument parsing -------------------------------------------------------


def _add_shared(p: argparse.ArgumentParser, formats=("csv", "json")):
    p.add_argument("--seed", type=int, default=s.DEFAULT_SEED, help="64-bit seed (default %(default)s)")
    p.add_argument("--out", type=Path, help="output file (default: stdout)")
    p.add_argument("--format", choices=formats, help="output format")
    p.add_argument("--url", help="base URL of a running service; default runs in-process")


def _add_theta(p: argparse.ArgumentParser):
    g = p.add_argument_group("parameters")
    g.add_argument("--alpha", type=float, help="gamma shape")
    g.add_argument("--beta", type=float, help="gamma rate")
    g.add_argument("--delta", type=float, default=0.0, help="location (default 0)")
    g.add_argument("--mu", type=float, default=0.0, help="skew (default 0)")
    g.add_argument("--sigma", type=float, default=1.0, help="scale (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description="BGGL law toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("sample", help="draw (x, y) pairs")
    _add_shared(p)
    _add_theta(p)
    p.add_argument("--n", type=int, required=True, help="number of pairs")

    p = sub.add_parser("fit", help="fit all five parameters to an x,y CSV")
    _add_shared(p)
    p.add_argument("--in", dest="infile", type=Path, required=True, help="CSV with columns x,y")
    p.add_argument("--boundary-tol", type=float, default=0.02, help="|alpha - 1| treated as boundary")

    p = sub.add_parser("table1", help="the eight-block simulation study")
    _add_shared(p, formats=("csv", "json", "text"))
    p.add_argument("--replications", type=int, default=5000)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("finance", help="volatility-surprise pipeline on a date,close,vol CSV")
    _add_shared(p)
    p.add_argument("--in", dest="infile", type=Path, required=True, help="CSV with columns date,close,vol")
    p.add_argument("--aggregate-daily", action="store_true", help="input is daily; reduce to ISO weeks")
    p.add_argument("--qq-dir", type=Path, help="also write the three QQ datasets as CSV files here")

    p = sub.add_parser("qq", help="QQ data of values against a law")
    _add_shared(p)
    _add_theta(p)
    p.add_argument("--in", dest="infile", type=Path, required=True, help="CSV with a 'value' column")
    p.add_argument("--law", choices=("gamma", "gal", "normal"), required=True)
    p.add_argument("--loc", type=float, default=0.0, help="normal law location")
    p.add_argument("--scale", type=float, default=1.0, help="normal law scale")

    p = sub.add_parser("levy-path", help="path of the gamma-subordinated Brownian motion")
    _add_shared(p)
    _add_theta(p)
    p.add_argument("--t-max", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=1000)

    p = sub.add_parser("limit-law", help="draws from the limit law of the normalized MLE")
    _add_shared(p)
    _add_theta(p)
    p.add_argument("--size", type=int, default=1000)
    p.add_argument("--regime", choices=("regular", "boundary", "heavy"))

    p = sub.add_parser("rate-slope", help="log-log slope of RMSE(delta_hat) against n")
    _add_shared(p)
    _add_theta(p)
    p.add_argument("--n-grid", default="200,800,3200,12800", help="comma-separated sample sizes")
    p.add_argument("--replications", type=int, default=2000)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


# -- requests ---------------------------------------------------------------


def _theta(args) -> dict:
    if args.alpha is None or args.beta is None:
        raise UsageError("--alpha and --beta are required")
    return {"alpha": args.alpha, "beta": args.beta, "delta": args.delta, "mu": args.mu, "sigma": args.sigma}


def _read_csv(path: Path, columns: list[str]) -> pd.DataFrame:
    try:
        df = pd.read_csv(path, float_precision="round_trip")
    except (ValueError, pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise DataFormatError(f"cannot parse {path}: {exc}") from exc
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise DataFormatError(f"{path} lacks column(s): {', '.join(missing)}")
    df = df[columns]
    if df.isna().any().any() or not all(pd.api.types.is_numeric_dtype(df[c]) for c in columns):
        raise DataFormatError(f"{path} has empty or non-numeric values")
    return df


def build_request(args) -> BaseModel:
    cmd = args.command
    if cmd == "sample":
        return s.SampleRequest(theta=_theta(args), n=args.n, seed=args.seed)
    if cmd == "fit":
        df = _read_csv(args.infile, ["x", "y"])
        return s.FitRequest(x=df["x"].tolist(), y=df["y"].tolist(), boundary_tol=args.boundary_tol)
    if cmd == "table1":
        return s.Table1Request(seed=args.seed, replications=args.replications, workers=args.workers)
    if cmd == "finance":
        return s.FinanceRequest(csv_text=args.infile.read_text(encoding="utf-8"), aggregate_daily=args.aggregate_daily)
    if cmd == "qq":
        values = _read_csv(args.infile, ["value"])["value"].tolist()
        theta = None if args.law == "normal" else _theta(args)
        return s.QQRequest(values=values, law=args.law, theta=theta, loc=args.loc, scale=args.scale)
    if cmd == "levy-path":
        return s.LevyPathRequest(theta=_theta(args), t_max=args.t_max, steps=args.steps, seed=args.seed)
    if cmd == "limit-law":
        return s.LimitLawRequest(theta=_theta(args), size=args.size, regime=args.regime, seed=args.seed)
    if cmd == "rate-slope":
        try:
            grid = [int(v) for v in args.n_grid.split(",") if v.strip()]
        except ValueError as exc:
            raise UsageError(f"--n-grid: {exc}") from exc
        return s.RateSlopeRequest(theta=_theta(args), n_grid=grid, replications=args.replications, seed=args.seed)
    raise UsageError(f"unknown command {cmd!r}")


def call(command: str, request: BaseModel, url: str | None = None) -> BaseModel:
    """Run ``command`` in-process, or against the service at ``url``."""
    _, response_type, handler = HANDLERS[command]
    if url is None:
        return handler(request)
    import httpx

    resp = httpx.post(f"{url.rstrip('/')}/{command}", json=request.model_dump(mode="json"), timeout=None)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail")
        except ValueError:
            detail = resp.text
        raise RemoteError(f"service returned {resp.status_code}: {detail}", resp.status_code)
    return response_type.model_validate(resp.json())


# -- output -----------------------------------------------------------------

DEFAULT_FORMAT = {
    "sample": "csv",
    "fit": "json",
    "table1": "json",
    "finance": "json",
    "qq": "csv",
    "levy-path": "csv",
    "limit-law": "csv",
    "rate-slope": "json",
}


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(model: BaseModel) -> str:
    return json.dumps(model.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"


def _flat_params(d: dict, prefix: str = ""):
    for k, v in d.items():
        name = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flat_params(v, name + ".")
        elif isinstance(v, list):
            yield name, json.dumps(v)
        else:
            yield name, v


def render(command: str, resp: BaseModel, fmt: str) -> str:
    if fmt == "json":
        return _json(resp)
    if command == "sample":
        return _csv(["x", "y"], zip(map(repr, resp.x), map(repr, resp.y)))
    if command == "qq":
        return _csv(["theoretical", "empirical"], zip(map(repr, resp.theoretical), map(repr, resp.empirical)))
    if command == "levy-path":
        return _csv(["t", "g", "w"], zip(map(repr, resp.times), map(repr, resp.g), map(repr, resp.w)))
    if command == "limit-law":
        return _csv(resp.components, ([repr(v) for v in row] for row in resp.draws))
    if command == "rate-slope":
        return _csv(["n", "rmse"], zip(resp.n_grid, map(repr, resp.rmse)))
    if command == "table1":
        if fmt == "text":
            return resp.text + "\n"
        rows = []
        for rep in resp.reports:
            alpha = rep.config["theta_true"]["alpha"]
            n = rep.config["n"]
            for r in rep.rows:
                rows.append([alpha, n, r.param, r.actual, r.mean, r.variance, r.rmse, r.mae])
        return _csv(["alpha", "n", "param", "actual", "mean", "variance", "rmse", "mae"], rows)
    if command == "fit":
        return _csv(["name", "value"], _flat_params(resp.model_dump(mode="json")))
    if command == "finance":
        d = resp.model_dump(mode="json")
        d.pop("qq")
        return _csv(["name", "value"], _flat_params(d))
    raise UsageError(f"format {fmt!r} not supported for {command}")


def _write(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _one_line(exc: Exception) -> str:
    if isinstance(exc, ValidationError):
        err = exc.errors()[0]
        loc = ".".join(str(p) for p in err["loc"]) or "request"
        return f"invalid parameters: {loc}: {err['msg']}"
    return " ".join(str(exc).split())


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.command == "serve":
        import uvicorn

        uvicorn.run("bggl.service.app:app", host=args.host, port=args.port)
        return 0

    try:
        request = build_request(args)
    except (UsageError, ValidationError) as exc:
        print(f"{PROG} {args.command}: error: {_one_line(exc)}", file=sys.stderr)
        return 2
    except (BgglError, OSError) as exc:
        print(f"{PROG} {args.command}: {_one_line(exc)}", file=sys.stderr)
        return 1

    try:
        resp = call(args.command, request, args.url)
        fmt = args.format or DEFAULT_FORMAT[args.command]
        _write(render(args.command, resp, fmt), args.out)
        if args.command == "finance" and args.qq_dir is not None:
            args.qq_dir.mkdir(parents=True, exist_ok=True)
            for name, data in resp.qq.items():
                if data is not None:
                    text = _csv(["theoretical", "empirical"], zip(map(repr, data.theoretical), map(repr, data.empirical)))
                    (args.qq_dir / f"{name}.csv").write_text(text, encoding="utf-8")
    except RemoteError as exc:
        print(f"{PROG} {args.command}: {exc}", file=sys.stderr)
        return 2 if exc.status == 422 else 1
    except (BgglError, OSError, ArithmeticError, ValueError) as exc:
        print(f"{PROG} {args.command}: {_one_line(exc)}", file=sys.stderr)
        return 1
    except Exception as exc:  # httpx transport failures and the like
        print(f"{PROG} {args.command}: {type(exc).__name__}: {_one_line(exc)}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
