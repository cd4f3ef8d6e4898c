import math

import numpy as np
import pytest
from scipy import stats

from bggl.dist import moments
from bggl.errors import DomainError
from bggl.params import BgglParams
from bggl.sample import (
    RngStream,
    draw_pairs,
    sample_bggl,
    sample_gamma,
    sample_levy_path,
    sample_positive_stable,
    sample_stable_subordinator,
)

KS_P = 1e-3


def within(values, target, k=4.0):
    v = np.asarray(values)
    return abs(v.mean() - target) < k * v.std(ddof=1) / math.sqrt(v.size)


class TestRngStream:
    def test_reproducible(self):
        a = sample_gamma(0.7, 2.0, RngStream(5, 3), size=1000)
        b = sample_gamma(0.7, 2.0, RngStream(5, 3), size=1000)
        np.testing.assert_array_equal(a, b)

    def test_streams_differ(self):
        a = RngStream(5, 0).generator.random(100)
        b = RngStream(5, 1).generator.random(100)
        assert not np.array_equal(a, b)
        assert abs(np.corrcoef(a, b)[0, 1]) < 0.4

    def test_full_64_bit_range(self):
        RngStream(2**64 - 1, 2**64 - 1).generator.random()
        with pytest.raises(DomainError):
            RngStream(-1)
        with pytest.raises(DomainError):
            RngStream(0, 2**64)

    def test_stateful(self):
        s = RngStream(1)
        assert s.generator.random() != s.generator.random()


class TestGamma:
    def test_mean_and_variance(self):
        x = sample_gamma(2.0, 1.0, RngStream(1), size=1_000_000)
        assert within(x, 2.0)
        assert within((x - 2.0) ** 2, 2.0)

    @pytest.mark.parametrize("alpha", [0.05, 0.25, 1.0, 3.3, 50.0])
    def test_ks(self, alpha):
        x = sample_gamma(alpha, 2.0, RngStream(2), size=100_000)
        assert stats.kstest(x, stats.gamma(alpha, scale=0.5).cdf).pvalue > KS_P

    def test_scalar(self):
        assert isinstance(sample_gamma(1.0, 1.0, RngStream(0)), float)

    def test_tiny_shape_positive(self):
        x = sample_gamma(0.01, 1.0, RngStream(4), size=10_000)
        assert np.all(x >= 0)

    @pytest.mark.parametrize("bad", [(0, 1), (1, 0), (-1, 1), (math.inf, 1)])
    def test_invalid(self, bad):
        with pytest.raises(DomainError):
            sample_gamma(*bad, RngStream(0))


class TestBggl:
    def test_mean_y(self):
        s = sample_bggl(BgglParams(2, 1, 0, 3, 1), 1_000_000, RngStream(3))
        assert within(s.y, 6.0)

    def test_zero_correlation(self):
        s = sample_bggl(BgglParams(2, 1, 0, 0, 1), 200_000, RngStream(4))
        xc, yc = s.x - s.x.mean(), s.y - s.y.mean()
        z = xc * yc / (s.x.std() * s.y.std())
        assert within(z, 0.0)

    def test_covariance_matches_moments(self):
        th = BgglParams(1, 8.39, 0.022, -0.0009, 0.0048)
        s = sample_bggl(th, 1_000_000, RngStream(6))
        m = moments(th)
        xc, yc = s.x - m.mean_x, s.y - m.mean_y
        assert within(xc * xc, m.cov[0, 0])
        assert within(xc * yc, m.cov[0, 1])
        assert within(yc * yc, m.cov[1, 1])

    def test_invalid_size(self):
        with pytest.raises(DomainError):
            sample_bggl(BgglParams(1, 1, 0, 0, 1), 0, RngStream(0))

    def test_infinite_divisibility(self):
        th = BgglParams(2.0, 1.5, 0.8, -0.4, 0.6)
        part = BgglParams(0.5, 1.5, 0.2, -0.4, 0.6)
        x4, y4 = draw_pairs(part, (100_000, 4), RngStream(7))
        x, y = draw_pairs(th, 100_000, RngStream(8))
        assert stats.ks_2samp(x4.sum(axis=1), x).pvalue > KS_P
        assert stats.ks_2samp(y4.sum(axis=1), y).pvalue > KS_P


class TestStable:
    @pytest.mark.parametrize("u", [0.0, 0.5, 1.0])
    def test_positive_stable_laplace(self, u):
        s = sample_positive_stable(0.6, RngStream(9), size=400_000)
        v = np.exp(-u * s)
        if u == 0:
            assert np.all(v == 1.0)
        else:
            assert within(v, math.exp(-(u**0.6)))

    def test_subordinator_at_one_half(self):
        xi = sample_stable_subordinator(0.5, RngStream(10), size=1_000_000)
        assert within(np.exp(-xi), math.exp(-math.sqrt(math.pi)))

    def test_subordinator_curve(self):
        a = 0.75
        xi = sample_stable_subordinator(a, RngStream(11), size=400_000)
        for u in (0.25, 0.5, 1.0, 2.0):
            assert within(np.exp(-u * xi), math.exp(-math.gamma(1 - a) * u**a))

    @pytest.mark.parametrize("a", [0.0, 1.0, 1.5])
    def test_domain(self, a):
        with pytest.raises(DomainError):
            sample_stable_subordinator(a, RngStream(0))


class TestLevyPath:
    def test_single_step_law(self):
        th = BgglParams(1.5, 2.0, 0.0, 0.7, 0.5)
        gen = RngStream(12).generator
        ends = np.array([sample_levy_path(th, [0.0, 1.0], gen).w[1] for _ in range(20_000)])
        gs = np.array([sample_levy_path(th, [0.0, 1.0], gen).g[1] for _ in range(20_000)])
        _, y = draw_pairs(th, 20_000, RngStream(13))
        assert stats.ks_2samp(ends, y).pvalue > KS_P
        assert stats.kstest(gs, stats.gamma(1.5, scale=0.5).cdf).pvalue > KS_P

    def test_trivial(self):
        p = sample_levy_path(BgglParams(1, 1, 0, 0, 1), [0.0], RngStream(0))
        assert p.g.tolist() == [0.0] and p.w.tolist() == [0.0]

    def test_additivity(self):
        th = BgglParams(0.8, 1.0, 0.0, -0.5, 1.2)
        gen = RngStream(14).generator
        m = 20_000
        half = np.array([sample_levy_path(th, [0.0, 0.5, 1.0], gen).w[-1] for _ in range(m)])
        full = np.array([sample_levy_path(th, [0.0, 1.0], gen).w[-1] for _ in range(m)])
        assert stats.ks_2samp(half, full).pvalue > KS_P

    def test_invariants(self):
        th = BgglParams(0.3, 1.0, 5.0, 1.0, 1.0)
        times = np.concatenate([[0.0], np.sort(RngStream(15).generator.uniform(0, 10, 500))])
        p = sample_levy_path(th, times, RngStream(16))
        assert p.g[0] == 0 and p.w[0] == 0
        assert np.all(np.diff(p.g) >= 0)
        assert len(p.g) == len(p.w) == len(times)

    def test_repeated_time_is_flat(self):
        p = sample_levy_path(BgglParams(1, 1, 0, 0, 1), [0.0, 1.0, 1.0, 2.0], RngStream(0))
        assert p.g[1] == p.g[2] and p.w[1] == p.w[2]

    @pytest.mark.parametrize("times", [[1.0, 2.0], [0.0, 2.0, 1.0], []])
    def test_bad_grid(self, times):
        with pytest.raises(DomainError):
            sample_levy_path(BgglParams(1, 1, 0, 0, 1), times, RngStream(0))
