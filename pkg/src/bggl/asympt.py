"""Asymptotic laws of the MLE in the three shape regimes.

Regular (alpha > 1): sqrt(n) rate and Gaussian limit with covariance equal
to the inverse Fisher information. Boundary (alpha = 1): the delta slot is
scaled by sqrt(n ln n). Heavy (alpha < 1): the delta slot is scaled by
n**(1/(2 alpha)) and its limit is a Gaussian scale mixture driven by a
stable subordinator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special as sc

from .errors import DomainError
from .estimate import Regime, classify_regime, location_scale_batch
from .params import BgglParams
from .sample import _generator, sample_gamma, sample_stable_subordinator


def sigma_alpha_beta(alpha: float, beta: float) -> np.ndarray:
    """Limiting covariance of sqrt(n)(alpha_hat - alpha, beta_hat - beta)."""
    if alpha <= 0 or beta <= 0:
        raise DomainError("alpha and beta must be positive")
    tg = float(sc.polygamma(1, alpha))
    return np.array([[alpha, beta], [beta, beta * beta * tg]]) / (alpha * tg - 1.0)


def sigma_delta_mu(theta: BgglParams) -> np.ndarray:
    """Limiting covariance of sqrt(n)(delta_hat - delta, mu_hat - mu), alpha > 1."""
    a, b = theta.alpha, theta.beta
    if a <= 1:
        raise DomainError(f"sigma_delta_mu needs alpha > 1, got {a}")
    return theta.upsilon / b * np.array([[a * (a - 1.0), -b * (a - 1.0)], [-b * (a - 1.0), b * b]])


def scaling_vector(regime, alpha: float, n: int) -> np.ndarray:
    """Diagonal of the normalizing matrix D_n for (alpha, beta, delta, mu, upsilon)."""
    regime = Regime(regime)
    if n < 2:
        raise DomainError("n must be at least 2")
    root = math.sqrt(n)
    if regime is Regime.REGULAR:
        delta_rate = root
    elif regime is Regime.BOUNDARY:
        delta_rate = math.sqrt(n * math.log(n))
    else:
        if not 0 < alpha < 1:
            raise DomainError(f"heavy regime needs alpha in (0, 1), got {alpha}")
        delta_rate = n ** (1.0 / (2.0 * alpha))
    return np.array([root, root, delta_rate, root, root])


def heavy_delta_scale(alpha: float, beta: float, upsilon: float) -> float:
    """c in W_delta = c * xi**(-1/2) * Z for the heavy regime."""
    return math.sqrt(upsilon / beta) * math.exp(sc.gammaln(alpha + 1.0) / (2.0 * alpha))


def asymptotic_covariance(regime, alpha: float, beta: float, upsilon: float) -> dict:
    """Per-regime blocks of the limit law, keyed by parameter group.

    ``alpha_beta`` is always the Gaussian block; ``delta_mu`` (regular) is a
    joint Gaussian block. Otherwise ``delta`` and ``mu`` are separate and
    ``delta`` is described by its kind (``gaussian`` with ``var`` or
    ``stable_mixture`` with ``scale``).
    """
    regime = Regime(regime)
    out: dict = {
        "alpha_beta": sigma_alpha_beta(alpha, beta),
        "upsilon_var": 2.0 * upsilon**2,
    }
    if regime is Regime.REGULAR:
        out["delta_mu"] = sigma_delta_mu(BgglParams(alpha, beta, 0.0, 0.0, 1.0)) * upsilon
    elif regime is Regime.BOUNDARY:
        out["delta"] = {"kind": "gaussian", "var": upsilon / beta}
        out["mu_var"] = upsilon * beta
    else:
        out["delta"] = {"kind": "stable_mixture", "scale": heavy_delta_scale(alpha, beta, upsilon)}
        out["mu_var"] = upsilon * beta / alpha
    return out


@dataclass(frozen=True)
class LimitLawSpec:
    """Limit law of D_n (theta_hat - theta) for one regime."""

    regime: Regime
    alpha: float

    @classmethod
    def for_theta(cls, theta: BgglParams, tol: float = 0.0) -> "LimitLawSpec":
        return cls(classify_regime(theta.alpha, tol), theta.alpha)

    def scaling(self, n: int) -> np.ndarray:
        return scaling_vector(self.regime, self.alpha, n)

    def mu_variance(self, theta: BgglParams) -> float:
        return theta.upsilon * theta.beta / min(theta.alpha, 1.0)

    def describe(self, theta: BgglParams) -> dict:
        return asymptotic_covariance(self.regime, theta.alpha, theta.beta, theta.upsilon)


def sample_limit_vector(spec: LimitLawSpec, theta: BgglParams, rng, size=None) -> np.ndarray:
    """Draw W = (W_alpha, W_beta, W_delta, W_mu, W_upsilon).

    Returns shape ``(5,)`` or ``(size, 5)``.
    """
    gen = _generator(rng)
    m = 1 if size is None else int(size)
    v = theta.upsilon
    out = np.empty((m, 5))
    out[:, :2] = gen.multivariate_normal(np.zeros(2), sigma_alpha_beta(theta.alpha, theta.beta), m)
    if spec.regime is Regime.REGULAR:
        out[:, 2:4] = gen.multivariate_normal(np.zeros(2), sigma_delta_mu(theta), m)
    else:
        if spec.regime is Regime.BOUNDARY:
            out[:, 2] = math.sqrt(v / theta.beta) * gen.standard_normal(m)
        else:
            xi = sample_stable_subordinator(theta.alpha, gen, size=m)
            out[:, 2] = heavy_delta_scale(theta.alpha, theta.beta, v) / np.sqrt(xi) * gen.standard_normal(m)
        out[:, 3] = math.sqrt(spec.mu_variance(theta)) * gen.standard_normal(m)
    out[:, 4] = math.sqrt(2.0) * v * gen.standard_normal(m)
    return out[0] if size is None else out


def inverse_sum_laplace_limit(alpha: float, beta: float, t) -> np.ndarray:
    """Limit Laplace transform of n**(-1/alpha) * sum(1/X_i), alpha in (0, 1)."""
    t = np.asarray(t, dtype=float)
    ratio = math.exp(sc.gammaln(1.0 - alpha) - sc.gammaln(1.0 + alpha))
    return np.exp(-ratio * beta**alpha * t**alpha)


def delta_errors(theta: BgglParams, n: int, replications: int, rng, chunk_elems: int = 2_000_000):
    """delta_hat - delta over independent replications of size-n samples."""
    gen = _generator(rng)
    per = max(1, chunk_elems // n)
    errs = []
    done = 0
    while done < replications:
        m = min(per, replications - done)
        x = sample_gamma(theta.alpha, theta.beta, gen, size=(m, n))
        y = theta.delta + theta.mu * x + theta.sigma * np.sqrt(x) * gen.standard_normal((m, n))
        d, _, _ = location_scale_batch(x, y)
        errs.append(d - theta.delta)
        done += m
    return np.concatenate(errs)


def delta_rmse_curve(theta: BgglParams, n_grid, replications: int, rng) -> np.ndarray:
    gen = _generator(rng)
    return np.array(
        [math.sqrt(np.mean(delta_errors(theta, int(n), replications, gen) ** 2)) for n in n_grid]
    )


class RateSlopeFit(NamedTuple):
    slope: float
    n_grid: np.ndarray
    rmse: np.ndarray


def rate_slope_fit(theta: BgglParams, n_grid, replications: int, rng) -> RateSlopeFit:
    """OLS fit of log RMSE(delta_hat) on log n, with the curve it was fitted to."""
    n_grid = np.asarray(sorted(set(int(n) for n in n_grid)))
    if n_grid.size < 3:
        raise DomainError("rate_slope needs at least three distinct sample sizes")
    if n_grid[0] < 3:
        raise DomainError("sample sizes must be at least 3")
    if replications < 2:
        raise DomainError("replications must be at least 2")
    rmse = delta_rmse_curve(theta, n_grid, replications, rng)
    slope = float(np.polyfit(np.log(n_grid), np.log(rmse), 1)[0])
    return RateSlopeFit(slope, n_grid, rmse)


def theoretical_rate_slope(alpha: float) -> float:
    """-1/(2 alpha) below one, -1/2 at and above (log factor ignored)."""
    return -0.5 / alpha if alpha < 1 else -0.5


def rate_slope(theta: BgglParams, n_grid, replications: int, rng) -> float:
    """OLS slope of log RMSE(delta_hat) against log n.

    Theory: -1/(2 alpha) for alpha < 1, -1/2 for alpha > 1, and slightly
    below -1/2 at alpha = 1 from the sqrt(ln n) factor.
    """
    return rate_slope_fit(theta, n_grid, replications, rng).slope
