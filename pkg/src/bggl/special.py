"""Scalar special functions: gamma family, Bessel K, and the gamma-MLE inverse.

The gamma-family and Bessel evaluations delegate to :mod:`scipy.special`;
the wrappers add domain checking and the log-space helpers the densities
need. ``solve_w_inverse`` is implemented here.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as sc

from .errors import ConvergenceError, DomainError

W_INV_TOL = 1e-12
W_INV_MAX_ITER = 200
W_BRACKET = (1e-8, 1e8)
# w(alpha) switches to its asymptotic series above this shape.
_W_SERIES_FROM = 50.0


def _check_positive(x, name="x"):
    x = float(x)
    if not x > 0 or math.isnan(x):
        raise DomainError(f"{name} must be positive, got {x!r}")
    return x


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    return float(sc.gammaln(_check_positive(x)))


def digamma(x: float) -> float:
    """psi(x) = d/dx ln Gamma(x) for x > 0."""
    return float(sc.psi(_check_positive(x)))


def trigamma(x: float) -> float:
    """psi'(x) for x > 0."""
    return float(sc.polygamma(1, _check_positive(x)))


def _order(nu):
    # K is even in nu and K_nu - K_0 = O(nu^2); scipy returns inf/nan for
    # subnormal orders, so those are flushed to zero
    nu = np.abs(np.asarray(nu, dtype=float))
    nu = np.where(nu < np.finfo(float).tiny, 0.0, nu)
    return float(nu) if nu.ndim == 0 else nu


def bessel_k(nu: float, x: float) -> float:
    """Modified Bessel function of the second kind K_nu(x), x > 0.

    Raises
    ------
    DomainError
        If ``x <= 0``.
    OverflowError
        If K_nu(x) is not representable as a double.
    """
    x = _check_positive(x)
    value = float(sc.kv(_order(nu), x))
    if math.isinf(value):
        raise OverflowError(f"K_{nu}({x}) overflows; use log_bessel_k")
    return value


def log_bessel_k(nu, x):
    """ln K_nu(x), elementwise, for x > 0 (x = 0 maps to +inf).

    Uses the exponentially scaled ``kve``; where that overflows (tiny x,
    large order) falls back to the small-argument leading term
    ``ln(Gamma(nu)/2) + nu ln(2/x)``.
    """
    nu = _order(nu)
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        scaled = sc.kve(nu, x)
        out = np.log(scaled) - x
        bad = ~np.isfinite(out) & (x > 0)
        if np.any(bad):
            nub, xb = np.broadcast_arrays(nu, x)
            nub, xb = nub[bad], xb[bad]
            approx = np.where(
                nub > 0,
                sc.gammaln(np.where(nub > 0, nub, 1.0)) - math.log(2.0) + nub * np.log(2.0 / xb),
                np.log(-np.log(xb / 2.0) - np.euler_gamma),
            )
            out = np.array(out, dtype=float)
            out[bad] = approx
        out = np.where(x == 0, np.inf, out)
    return out[()] if out.ndim == 0 else out


def f_alpha(alpha: float, x: float) -> float:
    """x**alpha * K_alpha(x) for 0 < alpha <= 1, continuous at x = 0.

    The value at the origin is the limit Gamma(alpha) * 2**(alpha - 1).
    """
    alpha = float(alpha)
    if not 0 < alpha <= 1:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha!r}")
    x = float(x)
    if x < 0 or math.isnan(x):
        raise DomainError(f"x must be nonnegative, got {x!r}")
    if x == 0:
        return math.exp(sc.gammaln(alpha) + (alpha - 1) * math.log(2.0))
    return math.exp(alpha * math.log(x) + float(log_bessel_k(alpha, x)))


def w_shape(alpha):
    """w(alpha) = ln(alpha) - psi(alpha), the gamma profile-likelihood slope.

    Strictly decreasing from +inf (alpha -> 0) to 0 (alpha -> inf).
    """
    a = np.asarray(alpha, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.log(a) - sc.psi(a)
        inv = 1.0 / np.where(a > 0, a, 1.0)
        inv2 = inv * inv
        # ln a - psi(a) = 1/(2a) + 1/(12a^2) - 1/(120a^4) + 1/(252a^6) - 1/(240a^8)
        series = 0.5 * inv + inv2 * (
            1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 / 240.0))
        )
    out = np.where(a >= _W_SERIES_FROM, series, direct)
    return float(out) if out.ndim == 0 else out


def _w_prime(alpha: float) -> float:
    return 1.0 / alpha - float(sc.polygamma(1, alpha))


def _initial_shape(rhs: float) -> float:
    return (3.0 - rhs + math.sqrt((rhs - 3.0) ** 2 + 24.0 * rhs)) / (12.0 * rhs)


def solve_w_inverse(rhs: float, tol: float = W_INV_TOL, max_iter: int = W_INV_MAX_ITER) -> float:
    """Solve ln(alpha) - psi(alpha) = rhs for alpha > 0.

    Newton iteration on ln(alpha), safeguarded by a shrinking bracket that
    falls back to geometric bisection whenever a step leaves it.

    Raises
    ------
    DomainError
        If ``rhs <= 0`` (no finite solution).
    ConvergenceError
        If the tolerance is not met within ``max_iter`` steps.
    """
    rhs = float(rhs)
    if not rhs > 0 or not math.isfinite(rhs):
        raise DomainError(f"rhs must be positive and finite, got {rhs!r}")
    lo, hi = W_BRACKET
    target_tol = tol * max(1.0, rhs)
    if w_shape(hi) > rhs or w_shape(lo) < rhs:
        raise DomainError(f"rhs={rhs!r} puts the solution outside [{lo:g}, {hi:g}]")

    alpha = min(max(_initial_shape(rhs), lo), hi)
    for _ in range(max_iter):
        resid = w_shape(alpha) - rhs
        if abs(resid) <= target_tol:
            return alpha
        # w is decreasing: positive residual means alpha is too small
        if resid > 0:
            lo = alpha
        else:
            hi = alpha
        slope = _w_prime(alpha) * alpha  # dw / d(ln alpha)
        step_ok = slope < 0 and math.isfinite(slope)
        if step_ok:
            candidate = alpha * math.exp(-resid / slope) if abs(resid / slope) < 50 else math.inf
            step_ok = lo < candidate < hi
        alpha = candidate if step_ok else math.sqrt(lo * hi)
        if hi / lo - 1.0 < 1e-15:
            break
    resid = w_shape(alpha) - rhs
    if abs(resid) <= target_tol:
        return alpha
    raise ConvergenceError(f"w inverse did not converge for rhs={rhs!r} (residual {resid:.3e})")
