"""Densities, transforms, moments, entropy and Fisher information of the
bivariate gamma / generalized asymmetric Laplace law.

Everything is evaluated in log space; the GAL marginal in particular
overflows quickly in its raw product form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sc

from .errors import DomainError, InfiniteInformationError
from .params import BgglParams
from .special import log_bessel_k

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GigParams:
    """Generalized inverse Gaussian parameters (a, b, p)."""

    a: float
    b: float
    p: float


@dataclass(frozen=True)
class MomentSummary:
    mean_x: float
    mean_y: float
    cov: np.ndarray
    rho: float


def _as_theta(theta) -> BgglParams:
    if isinstance(theta, BgglParams):
        return theta
    return BgglParams(*theta)


def joint_log_pdf(theta, x, y):
    """Log density of (X, Y) at ``(x, y)``; broadcasts over arrays.

    Raises
    ------
    DomainError
        If any ``x <= 0``.
    """
    t = _as_theta(theta)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("joint_log_pdf requires x > 0")
    resid = y - t.delta - t.mu * x
    with np.errstate(over="ignore"):
        quad = resid * resid / (2.0 * t.upsilon * x)
    out = (
        -_HALF_LOG_2PI
        - math.log(t.sigma)
        + t.alpha * math.log(t.beta)
        - sc.gammaln(t.alpha)
        + (t.alpha - 1.5) * np.log(x)
        - t.beta * x
        - quad
    )
    return float(out) if np.ndim(out) == 0 else out


def joint_pdf(theta, x, y):
    return np.exp(joint_log_pdf(theta, x, y))


def _gal_constants(t: BgglParams):
    """Reparameterized quantities of the GAL marginal.

    Returns ``(sigma_t, kappa, skew, decay)`` where ``skew`` multiplies
    ``(y - delta)`` in the exponential tilt and ``decay`` is the Bessel
    argument per unit ``|y - delta|``.
    """
    sigma_t = t.sigma / math.sqrt(t.beta)
    mu_t = t.mu / t.beta
    root = math.sqrt(2.0 * sigma_t**2 + mu_t**2)
    # two algebraically equal forms of kappa; pick the one free of cancellation
    if mu_t >= 0:
        kappa = math.sqrt(2.0) * sigma_t / (mu_t + root)
    else:
        kappa = (root - mu_t) / (math.sqrt(2.0) * sigma_t)
    c = math.sqrt(2.0) / (2.0 * sigma_t)
    # (1/kappa - kappa) = sqrt(2) mu_t / sigma_t, (1/kappa + kappa) = sqrt(2) root / sigma_t
    skew = c * (math.sqrt(2.0) * mu_t / sigma_t)
    decay = c * (math.sqrt(2.0) * root / sigma_t)
    return sigma_t, kappa, skew, decay


def _gal_log_const(t: BgglParams) -> float:
    sigma_t, kappa, _, _ = _gal_constants(t)
    return (
        0.5 * math.log(2.0)
        - 0.5 * math.log(math.pi)
        - (t.alpha + 0.5) * math.log(sigma_t)
        - sc.gammaln(t.alpha)
        + (t.alpha - 0.5) * (0.5 * math.log(2.0) - math.log(kappa + 1.0 / kappa))
    )


def gal_cusp_log_coefficient(theta) -> float:
    """ln C with density ~ C |y - delta|**(2 alpha - 1) as y -> delta, alpha < 1/2."""
    t = _as_theta(theta)
    if not t.alpha < 0.5:
        raise DomainError("the density is bounded at delta unless alpha < 1/2")
    _, _, _, decay = _gal_constants(t)
    p = t.alpha - 0.5
    return _gal_log_const(t) + sc.gammaln(-p) - math.log(2.0) + p * math.log(decay / 2.0)


def gal_marginal_log_pdf(theta, y):
    """Log density of the GAL marginal of Y; broadcasts over ``y``.

    At ``y == delta`` the value is the analytic limit when ``alpha > 1/2``
    and ``+inf`` when ``alpha <= 1/2`` (the density is unbounded there).
    """
    t = _as_theta(theta)
    y = np.asarray(y, dtype=float)
    _, _, skew, decay = _gal_constants(t)
    p = t.alpha - 0.5
    r = np.abs(y - t.delta)
    const = _gal_log_const(t)
    with np.errstate(divide="ignore"):
        # p ln r + ln K_p(decay r), with its r -> 0 limit where finite
        bessel_part = np.where(
            r > 0,
            p * np.log(np.where(r > 0, r, 1.0)) + log_bessel_k(p, decay * r),
            (sc.gammaln(p) - math.log(2.0) + p * math.log(2.0 / decay)) if p > 0 else np.inf,
        )
    out = const + skew * (y - t.delta) + bessel_part
    return float(out) if np.ndim(out) == 0 else out


def gal_marginal_pdf(theta, y):
    """GAL density of Y. Returns ``inf`` at ``y == delta`` when ``alpha <= 1/2``."""
    return np.exp(gal_marginal_log_pdf(theta, y))


def gig_conditional(theta, y: float) -> GigParams:
    """Parameters of the GIG law of X given Y = y."""
    t = _as_theta(theta)
    a = 2.0 * t.beta + t.mu**2 / t.upsilon
    b = (float(y) - t.delta) ** 2 / t.upsilon
    return GigParams(a=a, b=b, p=t.alpha - 0.5)


def gig_log_pdf(params: GigParams, x):
    """Log density of GIG(a, b, p) at ``x > 0``.

    With ``b == 0`` this is the gamma law with shape ``p`` and rate ``a/2``
    (requires ``p > 0``).
    """
    a, b, p = params.a, params.b, params.p
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("gig_log_pdf requires x > 0")
    if b == 0:
        if p <= 0:
            raise DomainError("GIG with b = 0 needs p > 0")
        rate = 0.5 * a
        out = p * math.log(rate) - sc.gammaln(p) + (p - 1) * np.log(x) - rate * x
    else:
        out = (
            0.5 * p * math.log(a / b)
            - math.log(2.0)
            - log_bessel_k(p, math.sqrt(a * b))
            + (p - 1) * np.log(x)
            - 0.5 * (a * x + b / x)
        )
    return float(out) if np.ndim(out) == 0 else out


def _mgf_arg(t: BgglParams, s, u):
    return s + t.mu * u + 0.5 * t.upsilon * u * u


def mgf(theta, s, t_):
    """Joint MGF E[exp(sX + tY)] on its domain ``s + mu t + sigma^2 t^2 / 2 < beta``."""
    t = _as_theta(theta)
    s = np.asarray(s, dtype=float)
    u = np.asarray(t_, dtype=float)
    arg = _mgf_arg(t, s, u)
    if np.any(arg >= t.beta):
        raise DomainError("(s, t) outside the MGF domain")
    out = np.exp(t.delta * u + t.alpha * (math.log(t.beta) - np.log(t.beta - arg)))
    return float(out) if np.ndim(out) == 0 else out


def char_fn(theta, s, t_):
    """Characteristic function E[exp(i(sX + tY))], principal branch."""
    t = _as_theta(theta)
    s = np.asarray(s, dtype=float)
    u = np.asarray(t_, dtype=float)
    base = 1.0 + (0.5 * t.upsilon * u * u - 1j * (s + t.mu * u)) / t.beta
    out = np.exp(1j * t.delta * u - t.alpha * np.log(base))
    return complex(out) if np.ndim(out) == 0 else out


def moments(theta) -> MomentSummary:
    t = _as_theta(theta)
    a, b, mu = t.alpha, t.beta, t.mu
    vx = a / b**2
    cxy = mu * a / b**2
    vy = mu**2 * a / b**2 + t.upsilon * a / b
    cov = np.array([[vx, cxy], [cxy, vy]])
    rho = mu / math.sqrt(mu**2 + t.upsilon * b)
    return MomentSummary(mean_x=a / b, mean_y=t.delta + mu * a / b, cov=cov, rho=rho)


def mixed_moment_xy(theta) -> float:
    """E[XY]."""
    t = _as_theta(theta)
    return t.delta * t.alpha / t.beta + t.mu * (t.alpha**2 + t.alpha) / t.beta**2


def shannon_entropy(theta) -> float:
    """Differential entropy of (X, Y) in nats."""
    t = _as_theta(theta)
    a = t.alpha
    return float(
        a
        - 1.5 * math.log(t.beta)
        + sc.gammaln(a)
        + (1.5 - a) * sc.psi(a)
        + 0.5 * math.log(2.0 * math.pi * math.e * t.upsilon)
    )


def fisher_information(theta) -> np.ndarray:
    """Per-observation Fisher information in the (alpha, beta, delta, mu, upsilon) order.

    Raises
    ------
    InfiniteInformationError
        For ``alpha <= 1``, where E[1/X] and hence the delta entry is infinite.
    """
    t = _as_theta(theta)
    a, b, v = t.alpha, t.beta, t.upsilon
    if a <= 1:
        raise InfiniteInformationError(
            f"Fisher information is infinite in the delta entry for alpha={a} <= 1"
        )
    info = np.zeros((5, 5))
    info[0, 0] = sc.polygamma(1, a)
    info[0, 1] = info[1, 0] = -1.0 / b
    info[1, 1] = a / b**2
    info[2, 2] = b / ((a - 1.0) * v)
    info[2, 3] = info[3, 2] = 1.0 / v
    info[3, 3] = a / (b * v)
    info[4, 4] = 0.5 / v**2
    return info


def fisher_information_sigma(theta) -> np.ndarray:
    """Fisher information reparameterized to (alpha, beta, delta, mu, sigma).

    Applies ``J^T I J`` with ``d upsilon / d sigma = 2 sigma``.
    """
    t = _as_theta(theta)
    jac = np.diag([1.0, 1.0, 1.0, 1.0, 2.0 * t.sigma])
    return jac.T @ fisher_information(t) @ jac


def score(theta, x, y) -> np.ndarray:
    """Analytic gradient of the log density in the upsilon parameterization.

    Returns an array of shape ``(..., 5)``.
    """
    t = _as_theta(theta)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    v = t.upsilon
    resid = y - t.delta - t.mu * x
    return np.stack(
        [
            math.log(t.beta) - sc.psi(t.alpha) + np.log(x),
            t.alpha / t.beta - x,
            resid / (v * x),
            resid / v,
            resid * resid / (2.0 * v * v * x) - 0.5 / v,
        ],
        axis=-1,
    )


def sufficient_statistics(x, y) -> np.ndarray:
    """The six statistics (ln x, x, y^2/x, y/x, 1/x, y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("sufficient_statistics requires x > 0")
    return np.stack([np.log(x), x, y * y / x, y / x, 1.0 / x, y + 0.0 * x], axis=-1)


def natural_parameters(theta) -> np.ndarray:
    """Natural parameters paired with :func:`sufficient_statistics`."""
    t = _as_theta(theta)
    v = t.upsilon
    return np.array(
        [
            t.alpha,
            -t.beta - t.mu**2 / (2.0 * v),
            -1.0 / (2.0 * v),
            t.delta / v,
            -(t.delta**2) / (2.0 * v),
            t.mu / v,
        ]
    )


def log_partition(theta) -> float:
    t = _as_theta(theta)
    v = t.upsilon
    return float(
        -(t.alpha * math.log(t.beta) - sc.gammaln(t.alpha)) + t.mu * t.delta / v + 0.5 * math.log(v)
    )


def log_base_measure(x):
    """ln h(x) = -ln(2 pi)/2 - (3/2) ln x."""
    return -_HALF_LOG_2PI - 1.5 * np.log(np.asarray(x, dtype=float))


def laplace_transform_inv_x(alpha: float, beta: float, t: float) -> float:
    """E[exp(-t / X)] for X ~ Gamma(alpha, rate beta), t >= 0."""
    if alpha <= 0 or beta <= 0:
        raise DomainError("alpha and beta must be positive")
    t = float(t)
    if t < 0:
        raise DomainError(f"t must be nonnegative, got {t!r}")
    if t == 0:
        return 1.0
    z = 2.0 * math.sqrt(t * beta)
    log_val = math.log(2.0) + 0.5 * alpha * math.log(t * beta) - sc.gammaln(alpha) + log_bessel_k(alpha, z)
    return min(1.0, math.exp(log_val))
