import math

import numpy as np
import pytest
from scipy import special as sc

from bggl.asympt import (
    LimitLawSpec,
    asymptotic_covariance,
    delta_errors,
    heavy_delta_scale,
    inverse_sum_laplace_limit,
    rate_slope,
    rate_slope_fit,
    sample_limit_vector,
    scaling_vector,
    sigma_alpha_beta,
    sigma_delta_mu,
    theoretical_rate_slope,
)
from bggl.dist import fisher_information, laplace_transform_inv_x
from bggl.errors import DomainError
from bggl.estimate import Regime
from bggl.params import BgglParams
from bggl.sample import RngStream, sample_gamma, sample_stable_subordinator


def gamma_block(a, b):
    return np.array([[sc.polygamma(1, a), -1 / b], [-1 / b, a / b**2]])


class TestCovarianceBlocks:
    def test_unit(self):
        z = math.pi**2 / 6
        np.testing.assert_allclose(sigma_alpha_beta(1, 1), np.array([[1, 1], [1, z]]) / (z - 1), rtol=1e-14)

    @pytest.mark.parametrize("a, b", [(0.1, 1), (1, 1), (2, 3), (30, 0.2)])
    def test_inverse_of_gamma_block(self, a, b):
        # entries of the information block reach a / b^2; the identity holds to 1e-12 relative to that
        scale = max(1.0, np.abs(gamma_block(a, b)).max())
        np.testing.assert_allclose(sigma_alpha_beta(a, b) @ gamma_block(a, b), np.eye(2), atol=1e-12 * scale)
        np.testing.assert_allclose(sigma_alpha_beta(a, b), np.linalg.inv(gamma_block(a, b)), rtol=1e-10)

    def test_delta_mu_substitution(self):
        np.testing.assert_allclose(sigma_delta_mu(BgglParams(2, 1, 0, 0, 1)), [[2, -1], [-1, 1]])

    def test_delta_entry_vanishes_at_one(self):
        vals = [sigma_delta_mu(BgglParams(1 + e, 1, 0, 0, 1))[0, 0] for e in (1e-2, 1e-4, 1e-8)]
        assert vals[-1] < 1e-7 and vals[0] > vals[1] > vals[2]

    def test_delta_mu_is_inverse_information_block(self):
        th = BgglParams(3, 2, 1, 0.5, 1.5)
        np.testing.assert_allclose(sigma_delta_mu(th), np.linalg.inv(fisher_information(th)[2:4, 2:4]), rtol=1e-12)

    def test_delta_mu_domain(self):
        with pytest.raises(DomainError):
            sigma_delta_mu(BgglParams(1, 1, 0, 0, 1))

    def test_asymptotic_covariance_per_regime(self):
        reg = asymptotic_covariance(Regime.REGULAR, 2.0, 1.0, 4.0)
        np.testing.assert_allclose(reg["delta_mu"], sigma_delta_mu(BgglParams(2, 1, 0, 0, 2)))
        bnd = asymptotic_covariance("boundary", 1.0, 2.0, 4.0)
        assert bnd["delta"]["var"] == 2.0 and bnd["mu_var"] == 8.0
        hv = asymptotic_covariance("heavy", 0.5, 2.0, 4.0)
        assert hv["delta"]["kind"] == "stable_mixture" and hv["mu_var"] == 16.0
        assert reg["upsilon_var"] == 32.0


class TestScaling:
    def test_regular(self):
        np.testing.assert_allclose(scaling_vector("regular", 2.0, 100), [10] * 5)

    def test_heavy(self):
        assert scaling_vector("heavy", 0.5, 10_000)[2] == pytest.approx(1e4)

    def test_boundary(self):
        n = 5000
        assert scaling_vector("boundary", 1.0, n)[2] == pytest.approx(math.sqrt(n * math.log(n)))

    def test_errors(self):
        with pytest.raises(DomainError):
            scaling_vector("heavy", 1.5, 100)
        with pytest.raises(DomainError):
            scaling_vector("regular", 2.0, 1)


def _corr_ok(w, i, j):
    a = (w[:, i] - w[:, i].mean()) / w[:, i].std()
    b = (w[:, j] - w[:, j].mean()) / w[:, j].std()
    p = a * b
    return abs(p.mean()) < 4 * p.std() / math.sqrt(len(p))


class TestLimitVector:
    def test_regular_covariance_is_inverse_information(self):
        th = BgglParams(3, 2, 0, 0.5, 1.2)
        w = sample_limit_vector(LimitLawSpec.for_theta(th), th, RngStream(1), size=400_000)
        target = np.linalg.inv(fisher_information(th))
        emp = np.cov(w.T)
        scale = np.sqrt(np.outer(np.diag(target), np.diag(target)))
        np.testing.assert_allclose(emp / scale, target / scale, atol=0.012)

    def test_heavy_delta_second_moment(self):
        th = BgglParams(0.5, 2.0, 0, 1, 0.8)
        w = sample_limit_vector(LimitLawSpec.for_theta(th), th, RngStream(2), size=400_000)
        inv_xi = 1.0 / sample_stable_subordinator(0.5, RngStream(3), size=400_000)
        w2 = w[:, 2] ** 2
        target = th.upsilon / th.beta * math.gamma(1.5) ** 2 * inv_xi.mean()
        se = math.sqrt(w2.var() / w2.size + (target / inv_xi.mean()) ** 2 * inv_xi.var() / inv_xi.size)
        assert abs(w2.mean() - target) < 4 * se
        assert heavy_delta_scale(0.5, 2.0, th.upsilon) ** 2 == pytest.approx(th.upsilon / th.beta * math.gamma(1.5) ** 2)

    def test_boundary_delta_variance(self):
        th = BgglParams(1, 2.0, 0, 1, 0.8)
        w = sample_limit_vector(LimitLawSpec.for_theta(th), th, RngStream(4), size=200_000)
        w2 = w[:, 2] ** 2
        assert abs(w2.mean() - th.upsilon / th.beta) < 4 * w2.std() / math.sqrt(w2.size)

    @pytest.mark.parametrize("alpha", [0.4, 1.0, 2.5])
    def test_mu_variance(self, alpha):
        th = BgglParams(alpha, 1.5, 0, 1, 0.7)
        spec = LimitLawSpec.for_theta(th)
        w = sample_limit_vector(spec, th, RngStream(5), size=200_000)
        w2 = w[:, 3] ** 2
        target = th.upsilon * th.beta / min(alpha, 1.0)
        assert spec.mu_variance(th) == pytest.approx(target)
        assert abs(w2.mean() - target) < 4 * w2.std() / math.sqrt(w2.size)

    @pytest.mark.parametrize("alpha", [0.4, 1.0, 2.5])
    def test_group_independence(self, alpha):
        # (alpha, beta) block, delta, mu and upsilon are mutually uncorrelated,
        # except delta and mu in the regular regime where they form one block
        th = BgglParams(alpha, 1.5, 0, 1, 0.7)
        spec = LimitLawSpec.for_theta(th)
        w = sample_limit_vector(spec, th, RngStream(6), size=100_000)
        pairs = [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 4), (3, 4)]
        if spec.regime is not Regime.REGULAR:
            pairs.append((2, 3))
        for i, j in pairs:
            assert _corr_ok(w, i, j), (i, j)

    def test_single_draw_shape(self):
        th = BgglParams(2, 1, 0, 0, 1)
        assert sample_limit_vector(LimitLawSpec.for_theta(th), th, RngStream(7)).shape == (5,)


class TestInverseSums:
    def test_heavy_laplace_transform_finite_n(self):
        # exact finite-n value is the n-th power of E exp(-t n^(-1/alpha) / X)
        alpha, beta, n, reps = 0.5, 1.5, 1000, 4000
        x = sample_gamma(alpha, beta, RngStream(8), size=(reps, n))
        s = n ** (-1 / alpha) * np.sum(1 / x, axis=1)
        for t in (0.05, 0.2, 0.5):
            v = np.exp(-t * s)
            exact = laplace_transform_inv_x(alpha, beta, t * n ** (-1 / alpha)) ** n
            assert abs(v.mean() - exact) < 4 * v.std() / math.sqrt(reps)
            assert exact == pytest.approx(float(inverse_sum_laplace_limit(alpha, beta, t)), abs=0.02)

    @pytest.mark.parametrize("n, reps", [(10_000, 1500), (100_000, 200)])
    def test_boundary_log_normalized_sum(self, n, reps):
        # (n ln n)^-1 sum(1/X) -> beta only at rate 1/ln n: sum(1/X)/(n beta) - ln n
        # tends to a totally skewed 1-stable law L with E exp(-tL) = exp(t ln t + (2 gamma - 1) t),
        # whose median K is frozen below (S1 stable median with scale pi/2, shifted).
        K = 1.2028
        beta = 2.0
        gen = RngStream(9).generator
        ratio = np.array([np.sum(1.0 / sample_gamma(1.0, beta, gen, size=n)) / (n * math.log(n) * beta) for _ in range(reps)])
        below = np.mean(ratio < 1.0 + K / math.log(n))
        assert abs(below - 0.5) < 4 * math.sqrt(0.25 / reps)
        # the ratio approaches one from above
        assert 1.0 < np.median(ratio) < 1.0 + 2.5 * K / math.log(n)


class TestRateSlope:
    def test_theory(self):
        assert theoretical_rate_slope(0.25) == -2.0
        assert theoretical_rate_slope(1.0) == -0.5
        assert theoretical_rate_slope(4.0) == -0.5

    def test_regular_slope(self):
        th = BgglParams(2, 1, 0, 0, 1)
        fit = rate_slope_fit(th, [100, 400, 1600], 600, RngStream(10))
        assert fit.slope == pytest.approx(-0.5, abs=0.1)
        assert np.all(np.diff(fit.rmse) < 0)
        assert rate_slope(th, [100, 400, 1600], 600, RngStream(10)) == fit.slope

    def test_heavy_slope(self):
        th = BgglParams(0.5, 1, 0, 0, 1)
        assert rate_slope(th, [100, 400, 1600], 600, RngStream(11)) == pytest.approx(-1.0, abs=0.15)

    @pytest.mark.parametrize("grid, reps", [([100, 200], 10), ([100, 100, 200, 200], 10), ([2, 10, 20], 10), ([10, 20, 40], 1)])
    def test_errors(self, grid, reps):
        with pytest.raises(DomainError):
            rate_slope_fit(BgglParams(2, 1, 0, 0, 1), grid, reps, RngStream(0))

    def test_delta_errors_chunking(self):
        th = BgglParams(2, 1, 0.3, 0, 1)
        a = delta_errors(th, 50, 101, RngStream(12), chunk_elems=500)
        assert a.shape == (101,)
