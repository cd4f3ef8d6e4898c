"""Replication harness for the sampling distribution of (delta_hat, sigma_hat, mu_hat)."""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .estimate import location_scale_batch
from .params import BgglParams
from .sample import RngStream, draw_pairs

PARAM_ORDER = ("delta", "sigma", "mu")

# Reference sampling summaries, keyed by (alpha, n); per parameter
# (actual, mean, variance, "rmse" column).
TABLE1_REFERENCE = {
    (1.0, 50): {"delta": (1, 0.9993, 0.0214, 0.1105), "sigma": (2, 1.9500, 0.0398, 0.1645), "mu": (3, 2.9998, 0.1062, 0.2581)},
    (1.0, 500): {"delta": (1, 1.0009, 0.0012, 0.0275), "sigma": (2, 1.9956, 0.0039, 0.0505), "mu": (3, 3.0010, 0.0094, 0.0770)},
    (0.25, 50): {"delta": (0, 0.0000, 0.0000, 0.0004), "sigma": (1, 0.9759, 0.0103, 0.0840), "mu": (0, -0.0006, 0.0872, 0.2319)},
    (0.25, 500): {"delta": (0, 0.0000, 0.0000, 0.0000), "sigma": (1, 0.9973, 0.0010, 0.0251), "mu": (0, 0.0001, 0.0081, 0.0722)},
    (2.0, 50): {"delta": (0, -0.0006, 0.0488, 0.1728), "sigma": (1, 0.9739, 0.0098, 0.0823), "mu": (0, 0.0031, 0.0219, 0.1168)},
    (2.0, 500): {"delta": (0, 0.0004, 0.0041, 0.0509), "sigma": (1, 0.9972, 0.0010, 0.0257), "mu": (0, -0.0001, 0.0021, 0.0362)},
    (5.0, 50): {"delta": (0, -0.0039, 0.4507, 0.5321), "sigma": (1, 0.9743, 0.0098, 0.0822), "mu": (0, 0.0004, 0.0222, 0.1179)},
    (5.0, 500): {"delta": (0, 0.0032, 0.0399, 0.1599), "sigma": (1, 0.9977, 0.0010, 0.0254), "mu": (0, -0.0011, 0.0020, 0.0358)},
}

TABLE1_BLOCKS = [(1.0, 50), (1.0, 500), (0.25, 50), (0.25, 500), (2.0, 50), (2.0, 500), (5.0, 50), (5.0, 500)]


def table1_theta(alpha: float) -> BgglParams:
    """True parameters of a block: (delta, sigma, mu) = (1, 2, 3) at alpha = 1, else (0, 1, 0)."""
    if alpha == 1.0:
        return BgglParams(alpha, 1.0, 1.0, 3.0, 2.0)
    return BgglParams(alpha, 1.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class StudyConfig:
    theta_true: BgglParams
    n: int
    replications: int
    seed: int = 0
    metrics: tuple[str, ...] = ("mean", "variance", "rmse")

    def __post_init__(self):
        if self.replications < 1:
            raise DomainError("replications must be at least 1")
        if self.n < 3:
            raise DomainError("n must be at least 3")


@dataclass(frozen=True)
class StudyRow:
    param: str
    actual: float
    mean: float
    variance: float
    rmse: float
    mae: float
    se_mean: float


@dataclass
class StudyReport:
    config: StudyConfig
    rows: dict[str, StudyRow]
    degenerate_count: int
    wall_clock: float = field(default=0.0, compare=False)

    def to_dict(self, include_timing: bool = False) -> dict:
        t = self.config.theta_true
        out = {
            "config": {
                "theta_true": t.as_dict(),
                "n": self.config.n,
                "replications": self.config.replications,
                "seed": self.config.seed,
            },
            "rows": [
                {k: getattr(self.rows[p], k) for k in ("param", "actual", "mean", "variance", "rmse", "mae", "se_mean")}
                for p in PARAM_ORDER
            ],
            "degenerate_count": self.degenerate_count,
        }
        if include_timing:
            out["wall_clock"] = self.wall_clock
        return out

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True)

    def to_text(self) -> str:
        """Aligned text table, one row per parameter."""
        c = self.config
        title = f"Sample size n = {c.n}, shape alpha = {c.theta_true.alpha:g}"
        header = f"{'':<6}{'Actual':>10}{'Mean':>12}{'Variance':>12}{'RMSE':>10}{'MAE':>10}"
        lines = [title, header]
        for p in PARAM_ORDER:
            r = self.rows[p]
            lines.append(f"{p:<6}{r.actual:>10.4g}{r.mean:>12.4f}{r.variance:>12.4f}{r.rmse:>10.4f}{r.mae:>10.4f}")
        if self.degenerate_count:
            lines.append(f"degenerate replications excluded: {self.degenerate_count}")
        return "\n".join(lines)


def _simulate_rows(theta: BgglParams, n: int, seed: int, first: int, last: int):
    x = np.empty((last - first, n))
    y = np.empty((last - first, n))
    for i, rep in enumerate(range(first, last)):
        x[i], y[i] = draw_pairs(theta, n, RngStream(seed, rep))
    return location_scale_batch(x, y)


def run_study(config: StudyConfig, workers: int = 1, chunk: int = 500) -> StudyReport:
    """Simulate ``replications`` samples and summarize the estimators.

    Replication ``r`` draws from ``RngStream(seed, r)``, so the report is a
    deterministic function of the config regardless of ``workers``.
    Replications whose fit is undefined are counted and excluded.
    """
    started = time.perf_counter()
    theta = config.theta_true
    reps = config.replications
    bounds = [(lo, min(lo + chunk, reps)) for lo in range(0, reps, chunk)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda b: _simulate_rows(theta, config.n, config.seed, *b), bounds))
    else:
        parts = [_simulate_rows(theta, config.n, config.seed, *b) for b in bounds]
    delta = np.concatenate([p[0] for p in parts])
    mu = np.concatenate([p[1] for p in parts])
    sigma = np.sqrt(np.maximum(np.concatenate([p[2] for p in parts]), 0.0))
    ok = np.isfinite(delta) & np.isfinite(mu) & np.isfinite(sigma)
    estimates = {"delta": delta[ok], "sigma": sigma[ok], "mu": mu[ok]}
    truth = {"delta": theta.delta, "sigma": theta.sigma, "mu": theta.mu}
    rows = {}
    for p in PARAM_ORDER:
        est = estimates[p]
        err = est - truth[p]
        var = float(np.var(est))
        rows[p] = StudyRow(
            param=p,
            actual=truth[p],
            mean=float(np.mean(est)),
            variance=var,
            rmse=float(math.sqrt(np.mean(err * err))),
            mae=float(np.mean(np.abs(err))),
            se_mean=math.sqrt(var / est.size),
        )
    return StudyReport(
        config=config,
        rows=rows,
        degenerate_count=int(np.count_nonzero(~ok)),
        wall_clock=time.perf_counter() - started,
    )


def block_seed(seed: int, index: int) -> int:
    """Independent 64-bit seed for block ``index`` of a suite."""
    child = np.random.SeedSequence(seed).spawn(index + 1)[index]
    return int(child.generate_state(1, np.uint64)[0])


def run_table1_suite(seed: int, replications: int = 5000, workers: int = 1) -> list[StudyReport]:
    """The eight (alpha, n) blocks with beta = 1, in reference order."""
    reports = []
    for i, (alpha, n) in enumerate(TABLE1_BLOCKS):
        cfg = StudyConfig(table1_theta(alpha), n, replications, seed=block_seed(seed, i))
        reports.append(run_study(cfg, workers=workers))
    return reports


def suite_to_json(reports: list[StudyReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True)


def suite_to_text(reports: list[StudyReport]) -> str:
    return "\n\n".join(r.to_text() for r in reports)
