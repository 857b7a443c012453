import math

import numpy as np
import pytest

from citedyn.curves import reference_kernel
from citedyn.duality import (mean_field_M, r_to_M, save_mean_curve,
                             tail_convergence_report)


def normalized_profile(n, rng=None, pin=None):
    rng = rng or np.random.default_rng(7)
    r = rng.uniform(0.01, 1.0, n)
    r /= r.sum()
    if pin is not None:
        idx, val = pin
        rest = 1.0 - val
        r[idx] = 0.0
        r *= rest / r.sum()
        r[idx] = val
    return r


class TestRToM:
    def test_zero_growth_is_rescaling(self):
        r = normalized_profile(20)
        curve = r_to_M(r, r * 0.4, r0=20.5, growth_exponent=0.0)
        np.testing.assert_allclose(curve.M, 20.5 * r, rtol=1e-15)

    def test_paper_constants_arithmetic(self):
        # r(10) = 0.02, R0 = 20.5, alpha+beta = 0.046
        r = normalized_profile(30, pin=(9, 0.02))
        curve = r_to_M(r, r * 0.3, r0=20.5, growth_exponent=0.046)
        assert curve.M[9] == pytest.approx(0.02 * 20.5 * math.exp(0.46), rel=1e-12)
        assert curve.M[9] == pytest.approx(0.6497, abs=5e-4)

    def test_unnormalized_rejected(self):
        r = np.full(10, 0.2)
        with pytest.raises(ValueError, match="normalized"):
            r_to_M(r, r, r0=20.5, growth_exponent=0.046)

    def test_default_curve_shape(self, default_params, default_curves):
        """Mean citation curve peaks early and decays monotonically after."""
        curve = r_to_M(default_curves.r, default_curves.r_dir, default_curves.R0,
                       default_params.growth_exponent)
        peak = int(np.argmax(curve.M)) + 1
        assert 2 <= peak <= 5
        assert np.all(np.diff(curve.M[peak - 1:]) <= 0)
        assert np.all(curve.M >= curve.M_dir)

    def test_round_trip_recovers_r(self, default_params, default_curves):
        curve = r_to_M(default_curves.r, default_curves.r_dir, default_curves.R0,
                       default_params.growth_exponent)
        t = np.arange(1.0, curve.horizon + 1.0)
        back = curve.M * np.exp(-default_params.growth_exponent * t) / default_curves.R0
        np.testing.assert_allclose(back, default_curves.r, rtol=1e-12, atol=1e-15)


class TestMeanFieldM:
    def test_zero_kernel(self):
        M_dir = np.array([1.0, 0.5, 0.25, 0.1])
        np.testing.assert_array_equal(mean_field_M(M_dir, np.zeros(4), 4), M_dir)

    def test_delta_impulse_hand_unroll(self):
        # M_dir = (1,0,0,...), constant kernel c: M(2)=c, M(3)=c+c^2
        c = 0.3
        M_dir = np.zeros(6)
        M_dir[0] = 1.0
        M = mean_field_M(M_dir, np.full(6, c), 6)
        assert M[1] == pytest.approx(c, abs=1e-15)
        assert M[2] == pytest.approx(c + c ** 2, abs=1e-15)

    def test_monotone_in_kernel(self, rng):
        M_dir = rng.uniform(0.0, 2.0, 15)
        G = rng.uniform(0.0, 0.3, 15)
        M1 = mean_field_M(M_dir, G, 15)
        M2 = mean_field_M(M_dir, G * 1.5, 15)
        assert np.all(M2 >= M1)

    def test_dominates_direct(self, rng):
        M_dir = rng.uniform(0.0, 2.0, 15)
        G = rng.uniform(0.0, 0.3, 15)
        assert np.all(mean_field_M(M_dir, G, 15) >= M_dir)

    def test_consistent_with_r_to_M(self, default_params, default_curves):
        """Duality maps the reference recursion onto the citation recursion:
        with M_dir = r_dir R0 e^{gt} and kernel G(tau) = T(tau) r(tau) e^{g tau},
        the mean-field solve must land on r_to_M of the self-consistent r."""
        H = default_curves.horizon
        g = default_params.growth_exponent
        t = np.arange(1.0, H + 1.0)
        T = reference_kernel(H, default_curves.R0)
        curve = r_to_M(default_curves.r, default_curves.r_dir, default_curves.R0, g)
        G = T * default_curves.r * np.exp(g * t)
        M = mean_field_M(curve.M_dir, G, H)
        np.testing.assert_allclose(M, curve.M, rtol=1e-10)

    def test_bad_horizon(self):
        with pytest.raises(ValueError):
            mean_field_M(np.ones(3), np.ones(3), 0)


class TestTailConvergence:
    def test_paper_regime(self, default_curves):
        rep = tail_convergence_report(default_curves.r, 0.046, tail_exponent=1.5)
        assert rep["reference_integral_converges"] is True
        assert rep["citation_integral_converges"] is False

    def test_zero_growth(self, default_curves):
        rep = tail_convergence_report(default_curves.r, 0.0, tail_exponent=1.5)
        assert rep["citation_integral_converges"] is True

    def test_partial_sums_grow_with_horizon(self):
        # power-law profile with the paper's tail, long horizons
        t = np.arange(1.0, 401.0)
        r = (t - 0.8) ** (-1.5)
        r /= r.sum()
        rep200 = tail_convergence_report(r, 0.046, 1.5, horizon=200)
        rep400 = tail_convergence_report(r, 0.046, 1.5, horizon=400)
        # reference side nearly saturated, citation side still growing hard
        ref_growth = rep400["reference_partial_sum"] / rep200["reference_partial_sum"]
        cit_growth = rep400["citation_partial_sum"] / rep200["citation_partial_sum"]
        assert ref_growth < 1.1
        assert cit_growth > math.exp(0.046 * 200) * (400 / 200) ** (-1.5) * 0.7
        assert cit_growth > 10

    def test_tail_exponent_must_exceed_one(self, default_curves):
        with pytest.raises(ValueError):
            tail_convergence_report(default_curves.r, 0.046, tail_exponent=1.0)


def test_mean_curve_csv(tmp_path, default_params, default_curves):
    curve = r_to_M(default_curves.r, default_curves.r_dir, default_curves.R0,
                   default_params.growth_exponent)
    path = tmp_path / "curve.csv"
    save_mean_curve(curve, path, provenance={"cmd": "duality"})
    lines = path.read_text().splitlines()
    assert lines[1] == "t,M,M_dir"
    assert len(lines) == 2 + curve.horizon
