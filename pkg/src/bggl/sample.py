"""Random generation: gamma variates, BGGL pairs, stable subordinator draws
and paths of the two-dimensional gamma-subordinated Levy process."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special as sc

from .errors import DomainError
from .params import BgglParams, PairedSample

_U64 = 2**64


@dataclass
class RngStream:
    """Reproducible random stream keyed by ``(seed, stream_id)``.

    Backed by the counter-based Philox generator. Streams with the same key
    produce identical sequences; distinct ``stream_id`` values under one
    seed are independent. A stream is stateful and meant for one owner.
    """

    seed: int
    stream_id: int = 0
    _gen: np.random.Generator | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            value = int(getattr(self, name))
            if not 0 <= value < _U64:
                raise DomainError(f"{name} must be a 64-bit unsigned integer, got {value}")
            setattr(self, name, value)

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
            self._gen = np.random.Generator(np.random.Philox(seq))
        return self._gen


def _generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def _standard_gamma(shape: float, size, gen: np.random.Generator) -> np.ndarray:
    """Marsaglia-Tsang squeeze/rejection sampler, vectorized over ``size``.

    Shapes below one are boosted: draw at ``shape + 1`` and multiply by
    ``U**(1/shape)``.
    """
    boost = shape < 1.0
    a = shape + 1.0 if boost else shape
    d = a - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(size, dtype=float)
    flat = out.reshape(-1)
    pending = np.arange(flat.size)
    while pending.size:
        m = pending.size
        z = gen.standard_normal(m)
        u = gen.random(m)
        v = 1.0 + c * z
        ok = v > 0
        v3 = np.where(ok, v * v * v, 1.0)
        z2 = z * z
        with np.errstate(divide="ignore"):
            accept = ok & (
                (u < 1.0 - 0.0331 * z2 * z2)
                | (np.log(u) < 0.5 * z2 + d * (1.0 - v3 + np.log(v3)))
            )
        flat[pending[accept]] = d * v3[accept]
        pending = pending[~accept]
    if boost:
        u = 1.0 - gen.random(flat.size)  # in (0, 1]
        flat *= np.exp(np.log(u) / shape)
    return out


def sample_gamma(alpha: float, beta: float, rng, size=None):
    """Draw from Gamma(shape ``alpha``, rate ``beta``) (mean ``alpha / beta``).

    Returns a float when ``size`` is None, otherwise an array.
    """
    alpha, beta = float(alpha), float(beta)
    if not (alpha > 0 and beta > 0) or not (math.isfinite(alpha) and math.isfinite(beta)):
        raise DomainError(f"gamma parameters must be positive, got ({alpha}, {beta})")
    gen = _generator(rng)
    draws = _standard_gamma(alpha, 1 if size is None else size, gen) / beta
    return float(draws[0]) if size is None else draws


def draw_pairs(theta: BgglParams, size, rng) -> tuple[np.ndarray, np.ndarray]:
    """Raw arrays ``(x, y)`` of shape ``size`` via Y = delta + mu X + sigma sqrt(X) Z."""
    gen = _generator(rng)
    x = sample_gamma(theta.alpha, theta.beta, gen, size=size)
    z = gen.standard_normal(x.shape)
    y = theta.delta + theta.mu * x + theta.sigma * np.sqrt(x) * z
    return x, y


def sample_bggl(theta: BgglParams, n: int, rng) -> PairedSample:
    """``n`` independent pairs from the BGGL law."""
    n = int(n)
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    x, y = draw_pairs(theta, n, rng)
    return PairedSample(x, y)


def sample_positive_stable(alpha: float, rng, size=None):
    """Standard one-sided stable variates with Laplace transform exp(-u**alpha).

    Kanter's representation: with U ~ Unif(0, pi) and E ~ Exp(1),
    ``sin(aU) / sin(U)**(1/a) * (sin((1-a)U) / E)**((1-a)/a)``.
    """
    alpha = float(alpha)
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    gen = _generator(rng)
    m = 1 if size is None else size
    u = math.pi * (1.0 - gen.random(m))
    e = gen.standard_exponential(m)
    log_s = (
        np.log(np.sin(alpha * u))
        - np.log(np.sin(u)) / alpha
        + (1.0 - alpha) / alpha * (np.log(np.sin((1.0 - alpha) * u)) - np.log(e))
    )
    s = np.exp(log_s)
    return float(s[0]) if size is None else s


def sample_stable_subordinator(alpha: float, rng, size=None):
    """Draws of xi with E[exp(-u xi)] = exp(-Gamma(1 - alpha) u**alpha)."""
    s = sample_positive_stable(alpha, rng, size=size)
    return s * math.exp(sc.gammaln(1.0 - alpha) / alpha)


@dataclass(frozen=True)
class LevyPath:
    times: np.ndarray
    g: np.ndarray
    w: np.ndarray


def sample_levy_path(theta: BgglParams, times, rng) -> LevyPath:
    """Path of (G(t), W(G(t))) on a time grid starting at 0.

    G is the gamma subordinator with G(t) - G(s) ~ Gamma(alpha (t - s), beta),
    W a Brownian motion with drift ``mu`` and scale ``sigma``. ``delta`` plays
    no role in the increments.
    """
    times = np.asarray(times, dtype=float).ravel()
    if times.size == 0 or times[0] != 0.0:
        raise DomainError("time grid must start at 0")
    dt = np.diff(times)
    if np.any(dt < 0) or not np.all(np.isfinite(times)):
        raise DomainError("time grid must be nondecreasing and finite")
    gen = _generator(rng)
    dg = np.zeros_like(dt)
    for i, step in enumerate(dt):
        if step > 0:
            dg[i] = _standard_gamma(theta.alpha * step, 1, gen)[0] / theta.beta
    dw = theta.mu * dg + theta.sigma * np.sqrt(dg) * gen.standard_normal(dt.size)
    g = np.concatenate([[0.0], np.cumsum(dg)])
    w = np.concatenate([[0.0], np.cumsum(dw)])
    return LevyPath(times=times, g=g, w=w)
