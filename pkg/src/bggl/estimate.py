"""Closed-form maximum likelihood for all five parameters, plus the AR(1)
fit of log volatility used by the finance pipeline."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import special as sc

from .errors import (
    DegenerateSampleError,
    DegenerateSampleWarning,
    DomainError,
    SampleTooSmallError,
)
from .params import BgglParams, PairedSample
from .special import solve_w_inverse

BOUNDARY_TOL = 0.02


class Regime(str, enum.Enum):
    REGULAR = "regular"  # alpha > 1
    BOUNDARY = "boundary"  # alpha == 1
    HEAVY = "heavy"  # alpha < 1


def classify_regime(alpha: float, tol: float = BOUNDARY_TOL) -> Regime:
    if abs(alpha - 1.0) <= tol:
        return Regime.BOUNDARY
    return Regime.REGULAR if alpha > 1.0 else Regime.HEAVY


class LocationScaleFit(NamedTuple):
    delta_hat: float
    mu_hat: float
    upsilon_hat: float


def gamma_profile_objective(alpha, x) -> np.ndarray:
    """Gamma log-likelihood per observation with beta profiled out (beta = alpha / mean x)."""
    x = np.asarray(x, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    log_mean = math.log(x.mean())
    mean_log = float(np.log(x).mean())
    return alpha * np.log(alpha) - alpha * log_mean - sc.gammaln(alpha) + alpha * mean_log - alpha


def location_scale_objective(delta, mu, upsilon, x, y) -> float:
    """g(delta, mu, upsilon): the (delta, mu, upsilon) part of the mean log-likelihood."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if upsilon <= 0:
        return -math.inf
    return float(
        -0.5 * math.log(upsilon)
        - np.mean((y - delta) ** 2 / (2.0 * upsilon * x))
        - mu**2 / (2.0 * upsilon) * x.mean()
        + mu / upsilon * (y.mean() - delta)
    )


def w_delta(delta, x, y):
    """(ybar - delta)^2 / xbar - mean((y - delta)^2 / x); never positive."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = np.asarray(delta, dtype=float)[..., None]
    return (y.mean() - d[..., 0]) ** 2 / x.mean() - np.mean((y - d) ** 2 / x, axis=-1)


def weighted_ls_objective(delta, mu, x, y) -> float:
    """sum((y - delta - mu x)^2 / x)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(np.sum((y - delta - mu * x) ** 2 / x))


def fit_gamma(x) -> tuple[float, float]:
    """MLE of gamma shape and rate.

    Raises
    ------
    SampleTooSmallError
        If fewer than two observations.
    DegenerateSampleError
        If all ``x`` are equal (the likelihood equation has no finite root).
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.size < 2:
        raise SampleTooSmallError("fit_gamma needs at least two observations")
    if np.any(~(x > 0)):
        raise DomainError("fit_gamma requires positive observations")
    if np.all(x == x[0]):
        raise DegenerateSampleError("all x are equal: gamma shape is not estimable")
    xbar = x.mean()
    rhs = math.log(xbar) - float(np.log(x).mean())
    if not rhs > 0:
        raise DegenerateSampleError(f"log(mean x) - mean(log x) = {rhs:.3e} is not positive")
    alpha = solve_w_inverse(rhs)
    return alpha, alpha / xbar


def _centered_sums(x, y, axis=-1):
    """Weighted centered cross products sum((x - xbar)^2 / x), sum((x - xbar)(y - ybar) / x)."""
    xbar = x.mean(axis=axis, keepdims=True)
    ybar = y.mean(axis=axis, keepdims=True)
    dx = x - xbar
    sxx = np.sum(dx * dx / x, axis=axis)
    sxy = np.sum(dx * (y - ybar) / x, axis=axis)
    return np.squeeze(xbar, axis), np.squeeze(ybar, axis), sxx, sxy


def location_scale_batch(x, y):
    """Vectorized (delta, mu, upsilon) MLEs over the last axis.

    Rows with all x equal come back as NaN in every slot.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xbar, ybar, sxx, sxy = _centered_sums(x, y)
    with np.errstate(invalid="ignore", divide="ignore"):
        mu = sxy / sxx
    delta = ybar - mu * xbar
    resid = y - np.expand_dims(delta, -1) - np.expand_dims(mu, -1) * x
    upsilon = np.mean(resid * resid / x, axis=-1)
    return delta, mu, upsilon


def fit_location_scale(sample: PairedSample) -> LocationScaleFit:
    """MLEs of (delta, mu, upsilon).

    Solved as weighted least squares with weights 1/x, written in centered
    form: ``mu = Sxy / Sxx`` and ``delta = ybar - mu * xbar``, where
    ``Sxx = sum((x - xbar)^2 / x)`` and ``Sxy = sum((x - xbar)(y - ybar) / x)``.

    When all x are equal, delta (and with it mu) is not identified: both are
    returned as NaN, upsilon as ``sum((y - ybar)^2) / (n x)``, and a
    :class:`DegenerateSampleWarning` is issued.
    """
    if sample.n < 2:
        raise SampleTooSmallError(
            "one observation gives an unbounded likelihood as upsilon -> 0"
        )
    x, y = sample.x, sample.y
    if np.all(x == x[0]):
        warnings.warn(
            "all x are equal: delta and mu are not identified", DegenerateSampleWarning, stacklevel=2
        )
        ups = float(np.sum((y - y.mean()) ** 2) / (sample.n * x[0]))
        return LocationScaleFit(math.nan, math.nan, ups)
    delta, mu, ups = location_scale_batch(x, y)
    return LocationScaleFit(float(delta), float(mu), max(float(ups), 0.0))


def conditional_sampling_law(sample_x, theta: BgglParams) -> np.ndarray:
    """Exact covariance of (delta_hat, mu_hat) given the x values.

    ``sigma^2 * [[sum 1/x, n], [n, sum x]]^-1``.
    """
    x = np.asarray(sample_x, dtype=float).ravel()
    if np.any(~(x > 0)):
        raise DomainError("x must be positive")
    n = x.size
    xbar = x.mean()
    sxx = float(np.sum((x - xbar) ** 2 / x))
    if n < 2 or sxx == 0.0:
        raise DegenerateSampleError("[[sum 1/x, n], [n, sum x]] is singular: all x equal")
    # det = sum(x) sum(1/x) - n^2, written without cancellation
    det = n * sxx / xbar
    inv = np.array([[x.sum(), -n], [-n, np.sum(1.0 / x)]]) / det
    return theta.upsilon * inv


@dataclass
class FitResult:
    """Point estimates with regime and asymptotic-law summary."""

    alpha_hat: float
    beta_hat: float
    delta_hat: float
    mu_hat: float
    upsilon_hat: float
    s2: float
    n: int
    regime: Regime
    d_n: np.ndarray
    asympt_cov: dict
    degenerate_flags: set[str] = field(default_factory=set)

    @property
    def sigma_hat(self) -> float:
        return math.sqrt(self.upsilon_hat)

    @property
    def theta_hat(self) -> BgglParams:
        """Estimates as :class:`BgglParams`; raises if sigma_hat is zero."""
        return BgglParams(self.alpha_hat, self.beta_hat, self.delta_hat, self.mu_hat, self.sigma_hat)

    def to_dict(self) -> dict:
        def plain(v):
            if isinstance(v, np.ndarray):
                return v.tolist()
            if isinstance(v, dict):
                return {k: plain(u) for k, u in v.items()}
            if isinstance(v, float) and not math.isfinite(v):
                return None
            return v

        return {
            "theta_hat": {
                "alpha": self.alpha_hat,
                "beta": self.beta_hat,
                "delta": self.delta_hat,
                "mu": self.mu_hat,
                "sigma": self.sigma_hat,
            },
            "upsilon_hat": self.upsilon_hat,
            "s2": plain(self.s2),
            "n": self.n,
            "regime": self.regime.value,
            "d_n": plain(self.d_n),
            "asympt_cov": plain(self.asympt_cov),
            "degenerate_flags": sorted(self.degenerate_flags),
        }


def fit_bggl(sample: PairedSample, boundary_tol: float = BOUNDARY_TOL) -> FitResult:
    """Fit all five parameters.

    Gamma part and (delta, mu, upsilon) part separate in the likelihood and
    are fitted independently.

    Flags: ``"n<=2"`` (upsilon_hat is always 0 with two points) and
    ``"collinear"`` (exact fit, every pairwise intercept equals delta_hat).

    Raises
    ------
    SampleTooSmallError, DegenerateSampleError
        Propagated from the component fits (``n < 2`` or all x equal).
    """
    from .asympt import asymptotic_covariance, scaling_vector

    if sample.n < 2:
        raise SampleTooSmallError("fit_bggl needs at least two observations")
    alpha, beta = fit_gamma(sample.x)
    delta, mu, ups = fit_location_scale(sample)
    flags: set[str] = set()
    n = sample.n
    if n <= 2:
        flags.add("n<=2")
        ups = 0.0
        s2 = math.nan
    else:
        scale = float(np.mean((sample.y - sample.y.mean()) ** 2 / sample.x))
        if ups <= 1e-13 * scale:
            flags.add("collinear")
            ups = 0.0
        s2 = n / (n - 2) * ups
    regime = classify_regime(alpha, boundary_tol)
    return FitResult(
        alpha_hat=alpha,
        beta_hat=beta,
        delta_hat=delta,
        mu_hat=mu,
        upsilon_hat=ups,
        s2=s2,
        n=n,
        regime=regime,
        d_n=scaling_vector(regime, alpha, n),
        asympt_cov=asymptotic_covariance(regime, alpha, beta, ups),
        degenerate_flags=flags,
    )


class Ar1Fit(NamedTuple):
    a_hat: float
    b_hat: float
    residuals: np.ndarray


def fit_ar1_log(v) -> Ar1Fit:
    """OLS fit of ln v[t] = a + b ln v[t-1] + zeta[t]; residuals have mean zero."""
    v = np.asarray(v, dtype=float).ravel()
    if v.size < 3:
        raise SampleTooSmallError("AR(1) fit needs at least three values")
    if np.any(~(v > 0)):
        raise DomainError("volatility values must be positive")
    logv = np.log(v)
    prev, cur = logv[:-1], logv[1:]
    dprev = prev - prev.mean()
    sxx = float(dprev @ dprev)
    if sxx == 0.0:
        raise DegenerateSampleError("lagged log volatility is constant: slope not estimable")
    b = float(dprev @ (cur - cur.mean())) / sxx
    a = float(cur.mean() - b * prev.mean())
    resid = cur - a - b * prev
    return Ar1Fit(a, b, resid)
