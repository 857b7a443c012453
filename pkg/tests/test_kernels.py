import math

import numpy as np
import pytest
from scipy import stats as sps

from citedyn.kernels import kernel_value, p0_of_K, p0_of_s, sample_fitness


class TestP0OfK:
    def test_reference_point(self):
        assert p0_of_K(1) == pytest.approx(0.34, abs=1e-15)

    def test_zero_clamped_to_one(self):
        assert p0_of_K(0) == p0_of_K(1)

    def test_ten_citations(self):
        # 0.34 * (1 + 0.82 * log10(10))
        assert p0_of_K(10) == pytest.approx(0.6188, abs=1e-12)

    def test_monotone_nondecreasing(self):
        K = np.arange(0, 2000)
        vals = p0_of_K(K)
        assert np.all(np.diff(vals) >= 0)

    def test_not_clamped_above_one(self):
        # rate multiplier, not a probability
        assert p0_of_K(10 ** 5) > 1.0


class TestP0OfS:
    def test_singlet(self):
        assert p0_of_s(1.0) == pytest.approx(0.44, abs=1e-15)

    def test_mean_multiplicity(self):
        assert p0_of_s(1.2) == pytest.approx(0.704, abs=1e-12)

    def test_can_exceed_one(self):
        assert p0_of_s(5.0 / 3.0) == pytest.approx(1.32, abs=1e-12)

    def test_rejects_below_one(self):
        with pytest.raises(ValueError):
            p0_of_s(0.99)


class TestKernelValue:
    def test_first_lag(self, default_params, default_curves):
        got = kernel_value(1, 1, default_params, default_curves)
        assert got == pytest.approx(0.34 * 0.089, abs=1e-12)
        assert got == pytest.approx(0.030260, abs=1e-6)

    def test_second_lag(self, default_params, default_curves):
        got = kernel_value(2, 1, default_params, default_curves)
        assert got == pytest.approx(0.046920, abs=1e-6)

    def test_rejects_nonpositive_lag(self, default_params, default_curves):
        for dt in (0, -1):
            with pytest.raises(ValueError):
                kernel_value(dt, 10, default_params, default_curves)

    def test_decreasing_in_lag_beyond_two(self, default_params, default_curves):
        vals = [kernel_value(dt, 50, default_params, default_curves)
                for dt in range(2, 25)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_nondecreasing_in_K(self, default_params, default_curves):
        for dt in (1, 3, 7):
            vals = [kernel_value(dt, K, default_params, default_curves)
                    for K in (0, 1, 5, 50, 500)]
            assert all(b >= a for a, b in zip(vals, vals[1:]))


@pytest.fixture(scope="module")
def draws():
    gen = np.random.default_rng(2718)
    return sample_fitness(gen, 1.62, 1.1, size=10 ** 6)


class TestSampleFitness:

    def test_median(self, draws):
        assert np.median(draws) == pytest.approx(math.exp(1.62), rel=0.02)

    def test_mean(self, draws):
        assert draws.mean() == pytest.approx(math.exp(1.62 + 1.1 ** 2 / 2), rel=0.03)

    def test_ks_against_lognormal_cdf(self, draws):
        ks = sps.kstest(draws, sps.lognorm(s=1.1, scale=math.exp(1.62)).cdf)
        assert ks.statistic < 0.005

    def test_sigma_zero_degenerates(self):
        gen = np.random.default_rng(0)
        vals = sample_fitness(gen, 1.62, 0.0, size=100)
        assert np.all(vals == math.exp(1.62))

    def test_deterministic_given_stream(self):
        a = sample_fitness(np.random.default_rng(5), 1.62, 1.1)
        b = sample_fitness(np.random.default_rng(5), 1.62, 1.1)
        assert a == b

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError):
            sample_fitness(np.random.default_rng(0), 1.62, -0.1)
