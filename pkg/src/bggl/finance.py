"""Index-price / volatility-index pipeline: weekly returns, surprise
volatility from an AR(1) fit of log volatility, a BGGL fit of the pairs and
QQ diagnostics."""

from __future__ import annotations

import functools
import io
import json
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import pandas as pd
from scipy import integrate, optimize, stats
from scipy import special as sc

from .dist import _gal_constants, gal_cusp_log_coefficient, gal_marginal_pdf, moments
from .errors import ConvergenceError, DataFormatError, DomainError, SampleTooSmallError
from .estimate import Ar1Fit, FitResult, fit_ar1_log, fit_bggl
from .params import BgglParams, PairedSample

MIN_PIPELINE_LENGTH = 10
QQ_PROB_TOL = 1e-8


@dataclass(frozen=True)
class VolSeries:
    """Aligned index closes and volatility-index levels."""

    dates: np.ndarray
    close: np.ndarray
    vol: np.ndarray

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]").ravel()
        close = np.asarray(self.close, dtype=float).ravel()
        vol = np.asarray(self.vol, dtype=float).ravel()
        if not dates.size == close.size == vol.size:
            raise DomainError("dates, close and vol must have equal lengths")
        if np.any(np.diff(dates) <= np.timedelta64(0, "D")):
            raise DomainError("dates must be strictly increasing")
        if np.any(~(close > 0)) or np.any(~(vol > 0)):
            raise DomainError("close and vol must be positive and finite")
        if not (np.all(np.isfinite(close)) and np.all(np.isfinite(vol))):
            raise DomainError("close and vol must be positive and finite")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "close", close)
        object.__setattr__(self, "vol", vol)

    def __len__(self) -> int:
        return int(self.dates.size)


def _frame_from_csv(source) -> pd.DataFrame:
    try:
        df = pd.read_csv(source, dtype={"close": float, "vol": float}, encoding="utf-8", float_precision="round_trip")
    except (ValueError, pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise DataFormatError(f"cannot parse CSV: {exc}") from exc
    missing = {"date", "close", "vol"} - set(df.columns)
    if missing:
        raise DataFormatError(f"CSV lacks column(s): {', '.join(sorted(missing))}")
    try:
        df["date"] = pd.to_datetime(df["date"], format="ISO8601")
    except (ValueError, TypeError) as exc:
        raise DataFormatError(f"bad date value: {exc}") from exc
    if df[["close", "vol"]].isna().any().any():
        raise DataFormatError("close/vol contain empty values")
    return df[["date", "close", "vol"]]


def aggregate_weekly(df: pd.DataFrame) -> pd.DataFrame:
    """Daily rows to ISO weeks: last close, mean vol, dated by the week's last day.

    Weeks with no rows simply do not appear.
    """
    df = df.sort_values("date")
    iso = df["date"].dt.isocalendar()
    grouped = df.groupby([iso["year"], iso["week"]], sort=True)
    out = grouped.agg(date=("date", "last"), close=("close", "last"), vol=("vol", "mean"))
    return out.reset_index(drop=True)


def series_from_frame(df: pd.DataFrame) -> VolSeries:
    return VolSeries(
        df["date"].to_numpy(dtype="datetime64[D]"),
        df["close"].to_numpy(dtype=float),
        df["vol"].to_numpy(dtype=float),
    )


def read_vol_csv(source, aggregate_daily: bool = False) -> VolSeries:
    """Read ``date,close,vol`` rows (a path or file-like object).

    With ``aggregate_daily`` the rows are treated as daily and reduced to
    ISO weeks first.
    """
    df = _frame_from_csv(source)
    if aggregate_daily:
        df = aggregate_weekly(df)
    return series_from_frame(df)


def compute_returns(series: VolSeries) -> np.ndarray:
    """Log price changes ln S(t) - ln S(t-1)."""
    if len(series) < 2:
        raise SampleTooSmallError("returns need at least two prices")
    return np.diff(np.log(series.close))


def compute_surprise_vol(series: VolSeries, a: float, b: float) -> np.ndarray:
    """X(t) = exp(ln V(t) - a - b ln V(t-1))."""
    if len(series) < 2:
        raise SampleTooSmallError("surprise volatility needs at least two values")
    logv = np.log(series.vol)
    return np.exp(logv[1:] - a - b * logv[:-1])


# -- quantile laws ----------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


class GalCdf:
    """Numerical CDF and quantile function of the GAL marginal.

    Works in offsets ``s = y - delta`` so that the cusp at ``delta`` can be
    resolved far below the float spacing of ``delta`` itself. The density is
    integrated segment by segment on a node table graded geometrically
    toward ``s = 0``; the table is normalized by its total mass, computed
    once.
    """

    def __init__(self, theta: BgglParams, segments: int = 512):
        self.theta = theta
        self._centered = BgglParams(theta.alpha, theta.beta, 0.0, theta.mu, theta.sigma)
        m = moments(self._centered)
        sd = math.sqrt(m.cov[1, 1])
        _, _, skew, decay = _gal_constants(theta)
        # tails decay like exp(-rate |s|); go far enough that both are negligible
        lo = min(0.0, m.mean_y) - 8.0 * sd - 30.0 / (decay + skew)
        hi = max(0.0, m.mean_y) + 8.0 * sd + 30.0 / (decay - skew)
        grid = np.linspace(lo, hi, segments + 1)
        # mass within r of the cusp scales like r**(2 alpha)
        levels = min(int(math.ceil(20.0 / theta.alpha)), 1000)
        r = (grid[1] - grid[0]) * np.exp2(-np.arange(1, levels + 1, dtype=float))
        r = r[r > 1e-290]
        graded = np.concatenate([-r, r])
        graded = graded[(graded > lo) & (graded < hi)]
        nodes = np.union1d(np.union1d(grid, graded), [0.0])
        self.nodes = nodes
        self._cusp = (nodes[:-1] == 0.0) | (nodes[1:] == 0.0)
        mass = np.array([self._quad(nodes[i], nodes[i + 1]) for i in range(nodes.size - 1)])
        if theta.alpha < 0.5:
            # innermost segments: integrate the leading power law exactly
            for i in np.flatnonzero(self._cusp):
                mass[i] = self._cusp_mass(nodes[i + 1] - nodes[i])
        left = integrate.quad(self._pdf_scalar, -np.inf, nodes[0], limit=200)[0]
        right = integrate.quad(self._pdf_scalar, nodes[-1], np.inf, limit=200)[0]
        self.total = left + float(mass.sum()) + right
        self.cum = (left + np.concatenate([[0.0], np.cumsum(mass)])) / self.total

    def _pdf(self, s):
        return gal_marginal_pdf(self._centered, s)

    def _pdf_scalar(self, s: float) -> float:
        # the point s == 0 carries no mass even where the density is infinite
        v = float(self._pdf(s))
        return v if math.isfinite(v) else 0.0

    def _quad(self, a: float, b: float) -> float:
        if a == b:
            return 0.0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            return integrate.quad(self._pdf_scalar, a, b, limit=200, epsabs=1e-15, epsrel=1e-12)[0]

    def _gl(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        half = 0.5 * (b - a)
        pts = 0.5 * (a + b)[:, None] + half[:, None] * _GL_NODES
        return half * (self._pdf(pts) @ _GL_WEIGHTS)

    def _cdf_offset(self, s: float) -> float:
        nodes = self.nodes
        if s < nodes[0]:
            return integrate.quad(self._pdf_scalar, -np.inf, s, limit=200)[0] / self.total
        if s >= nodes[-1]:
            return 1.0 - integrate.quad(self._pdf_scalar, s, np.inf, limit=200)[0] / self.total
        k = int(np.searchsorted(nodes, s, side="right") - 1)
        if self._cusp[k] and self.theta.alpha < 0.5:
            if nodes[k] == 0.0:
                return self.cum[k] + self._cusp_mass(s) / self.total
            return self.cum[k + 1] - self._cusp_mass(-s) / self.total
        return self.cum[k] + self._quad(nodes[k], s) / self.total

    def _cusp_mass(self, r: float) -> float:
        """Mass of (0, r) or (-r, 0) from the leading power law, alpha < 1/2."""
        if r <= 0:
            return 0.0
        a = self.theta.alpha
        return math.exp(gal_cusp_log_coefficient(self.theta) + 2.0 * a * math.log(r)) / (2.0 * a)

    def cdf(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        flat = y.ravel() - self.theta.delta
        out = np.empty_like(flat)
        k = np.searchsorted(self.nodes, flat, side="right") - 1
        inside = (k >= 0) & (k < self.nodes.size - 1)
        smooth = inside.copy()
        smooth[inside] = ~self._cusp[k[inside]]
        if smooth.any():
            ks = k[smooth]
            out[smooth] = self.cum[ks] + self._gl(self.nodes[ks], flat[smooth]) / self.total
        for i in np.flatnonzero(~smooth):
            out[i] = self._cdf_offset(flat[i])
        return out.reshape(y.shape)

    def _solve_scalar(self, p: float) -> float:
        nodes = self.nodes
        if p < self.cum[0]:
            width = nodes[-1] - nodes[0]
            a = nodes[0] - width
            while self._cdf_offset(a) > p:
                a -= 2.0 * width
            b = nodes[0]
        elif p >= self.cum[-1]:
            width = nodes[-1] - nodes[0]
            a, b = nodes[-1], nodes[-1] + width
            while self._cdf_offset(b) < p:
                b += 2.0 * width
        else:
            k = int(np.searchsorted(self.cum, p, side="right") - 1)
            a, b = nodes[k], nodes[k + 1]
        root = optimize.brentq(lambda u: self._cdf_offset(u) - p, a, b, xtol=1e-300, rtol=1e-15)
        if abs(self._cdf_offset(root) - p) > QQ_PROB_TOL:
            raise ConvergenceError(f"GAL quantile inversion failed at p={p}")
        return root

    def ppf(self, p) -> np.ndarray:
        """Quantiles with ``|cdf(q) - p| <= 1e-8`` (before rounding to ``delta + s``)."""
        p = np.asarray(p, dtype=float)
        flat = p.ravel()
        if np.any(~((flat > 0) & (flat < 1))):
            raise DomainError("probabilities must lie in (0, 1)")
        out = np.empty_like(flat)
        k = np.searchsorted(self.cum, flat, side="right") - 1
        inside = (k >= 0) & (k < self.nodes.size - 1)
        smooth = inside.copy()
        smooth[inside] = ~self._cusp[k[inside]]
        idx = np.flatnonzero(smooth)
        if idx.size:
            out[idx] = self._newton(flat[idx], k[idx])
        for i in np.flatnonzero(~smooth):
            out[i] = self._solve_scalar(float(flat[i]))
        return (self.theta.delta + out).reshape(p.shape)

    def _newton(self, p: np.ndarray, k: np.ndarray) -> np.ndarray:
        """Safeguarded Newton inside smooth segments, vectorized over targets."""
        a = self.nodes[k]
        b = self.nodes[k + 1]
        base = self.cum[k]
        frac = (p - base) / np.maximum(self.cum[k + 1] - base, 1e-300)
        lo, hi = a.copy(), b.copy()
        s = a + frac * (b - a)
        for _ in range(60):
            g = base + self._gl(a, s) / self.total - p
            if np.all(np.abs(g) <= 0.01 * QQ_PROB_TOL):
                break
            hi = np.where(g > 0, s, hi)
            lo = np.where(g <= 0, s, lo)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = s - g * self.total / self._pdf(s)
            bad = ~np.isfinite(step) | (step <= lo) | (step >= hi)
            s = np.where(bad, 0.5 * (lo + hi), step)
        g = base + self._gl(a, s) / self.total - p
        if np.any(np.abs(g) > QQ_PROB_TOL):
            raise ConvergenceError("GAL quantile inversion did not reach 1e-8 in probability")
        return s


@functools.lru_cache(maxsize=32)
def _gal_cdf_cached(theta_tuple: tuple) -> GalCdf:
    return GalCdf(BgglParams(*theta_tuple))


def gal_cdf(theta: BgglParams, y) -> np.ndarray:
    return _gal_cdf_cached(theta.as_tuple()).cdf(y)


def gal_ppf(theta: BgglParams, p) -> np.ndarray:
    return _gal_cdf_cached(theta.as_tuple()).ppf(p)


@dataclass(frozen=True)
class GammaLaw:
    alpha: float
    beta: float

    def ppf(self, p):
        return stats.gamma.ppf(p, self.alpha, scale=1.0 / self.beta)


@dataclass(frozen=True)
class GalLaw:
    theta: BgglParams

    def ppf(self, p):
        return gal_ppf(self.theta, p)


@dataclass(frozen=True)
class NormalLaw:
    loc: float = 0.0
    scale: float = 1.0

    def ppf(self, p):
        return stats.norm.ppf(p, loc=self.loc, scale=self.scale)


class QQData(NamedTuple):
    theoretical: np.ndarray
    empirical: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("theoretical,empirical\n")
        for t, e in zip(self.theoretical, self.empirical):
            buf.write(f"{float(t)!r},{float(e)!r}\n")
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"theoretical": self.theoretical.tolist(), "empirical": self.empirical.tolist()}


def plotting_positions(n: int) -> np.ndarray:
    return (np.arange(1, n + 1) - 0.5) / n


def qq_data(values, law) -> QQData:
    """Sorted values against law quantiles at (i - 0.5)/n."""
    v = np.sort(np.asarray(values, dtype=float).ravel())
    if v.size < 2:
        raise SampleTooSmallError("QQ data needs at least two values")
    return QQData(np.asarray(law.ppf(plotting_positions(v.size)), dtype=float), v)


# -- pipeline ---------------------------------------------------------------


def _finite_or_none(v) -> float | None:
    v = float(v)
    return v if math.isfinite(v) else None


@dataclass
class PipelineResult:
    ar1: Ar1Fit
    sample: PairedSample
    fit: FitResult
    residuals: np.ndarray
    qq: dict[str, QQData | None]

    def to_dict(self) -> dict:
        return {
            "ar1": {"a_hat": self.ar1.a_hat, "b_hat": self.ar1.b_hat},
            "n": self.sample.n,
            "fit": self.fit.to_dict(),
            "residual_mean": _finite_or_none(np.mean(self.residuals)),
            "residual_var": _finite_or_none(np.var(self.residuals)),
            "qq": {k: (None if q is None else q.to_dict()) for k, q in self.qq.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False)


def residuals_z(sample: PairedSample, fit: FitResult) -> np.ndarray:
    """Z_i = (Y_i - delta - mu X_i) / (sigma sqrt(X_i)); NaN if sigma_hat is 0."""
    if fit.upsilon_hat == 0.0:
        return np.full(sample.n, np.nan)
    return (sample.y - fit.delta_hat - fit.mu_hat * sample.x) / (fit.sigma_hat * np.sqrt(sample.x))


def run_pipeline(series: VolSeries) -> PipelineResult:
    """AR(1) on log vol, surprise volatility, returns, BGGL fit, residuals, QQ sets.

    When ``upsilon_hat`` is 0 the fit carries the ``collinear`` flag and the
    Y and Z QQ datasets are ``None``.
    """
    if len(series) < MIN_PIPELINE_LENGTH:
        raise SampleTooSmallError(f"pipeline needs at least {MIN_PIPELINE_LENGTH} weeks, got {len(series)}")
    ar1 = fit_ar1_log(series.vol)
    x = compute_surprise_vol(series, ar1.a_hat, ar1.b_hat)
    y = compute_returns(series)
    sample = PairedSample(x, y)
    fit = fit_bggl(sample)
    z = residuals_z(sample, fit)
    qq: dict[str, QQData | None] = {"x_gamma": qq_data(x, GammaLaw(fit.alpha_hat, fit.beta_hat))}
    if fit.upsilon_hat > 0:
        qq["y_gal"] = qq_data(y, GalLaw(fit.theta_hat))
        qq["z_normal"] = qq_data(z, NormalLaw())
    else:
        qq["y_gal"] = None
        qq["z_normal"] = None
    return PipelineResult(ar1=ar1, sample=sample, fit=fit, residuals=z, qq=qq)


def synthetic_series(a: float, b: float, theta: BgglParams, length: int, rng, v0: float | None = None,
                     s0: float = 100.0, start: str = "2000-01-07") -> VolSeries:
    """Weekly series from ln V(t) = a + b ln V(t-1) + ln X(t), S(t) = S(t-1) exp(Y(t)).

    ``(X(t), Y(t))`` are independent BGGL pairs. ``v0`` defaults to the
    stationary mean of ln V, ``(a + psi(alpha) - ln beta) / (1 - b)``.
    """
    from .sample import draw_pairs

    if length < 2:
        raise DomainError("length must be at least 2")
    if not abs(b) < 1:
        raise DomainError("AR coefficient must satisfy |b| < 1")
    x, y = draw_pairs(theta, length - 1, rng)
    logv = np.empty(length)
    mean_log_x = float(sc.psi(theta.alpha)) - math.log(theta.beta)
    logv[0] = math.log(v0) if v0 is not None else (a + mean_log_x) / (1.0 - b)
    for t in range(1, length):
        logv[t] = a + b * logv[t - 1] + math.log(x[t - 1])
    close = s0 * np.exp(np.concatenate([[0.0], np.cumsum(y)]))
    dates = np.datetime64(start, "D") + 7 * np.arange(length)
    return VolSeries(dates, close, np.exp(logv))
