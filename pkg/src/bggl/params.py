"""Parameter and data containers shared by every module."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SampleTooSmallError


@dataclass(frozen=True)
class BgglParams:
    """Five-parameter vector ``(alpha, beta, delta, mu, sigma)``.

    ``alpha`` and ``beta`` are the shape and rate of the gamma component X,
    ``delta`` the location, ``mu`` the drift and ``sigma`` the scale of
    ``Y = delta + mu * X + sigma * sqrt(X) * Z``.
    """

    alpha: float
    beta: float
    delta: float
    mu: float
    sigma: float

    def __post_init__(self):
        for name in ("alpha", "beta", "delta", "mu", "sigma"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        for name in ("alpha", "beta", "sigma"):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)!r}")

    @property
    def upsilon(self) -> float:
        return self.sigma * self.sigma

    @classmethod
    def from_upsilon(cls, alpha, beta, delta, mu, upsilon) -> "BgglParams":
        if upsilon <= 0:
            raise DomainError(f"upsilon must be positive, got {upsilon!r}")
        return cls(alpha, beta, delta, mu, math.sqrt(upsilon))

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.alpha, self.beta, self.delta, self.mu, self.sigma)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(("alpha", "beta", "delta", "mu", "sigma"), self.as_tuple()))


@dataclass(frozen=True)
class PairedSample:
    """Aligned observations ``(x_i, y_i)`` with every ``x_i > 0``."""

    x: np.ndarray
    y: np.ndarray
    n: int = field(init=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).ravel()
        y = np.asarray(self.y, dtype=float).ravel()
        if x.shape != y.shape:
            raise DomainError(f"x and y lengths differ: {x.size} vs {y.size}")
        if x.size < 1:
            raise SampleTooSmallError("sample is empty")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise DomainError("sample contains non-finite values")
        if np.any(x <= 0):
            raise DomainError("all x must be strictly positive")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "n", int(x.size))

    def __len__(self):
        return self.n
