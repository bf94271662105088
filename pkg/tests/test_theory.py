import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from interplab.errors import DegenerateSurvival, InvalidBracket, InvalidEigen
from interplab.theory import (
    Verdict,
    bias_bound,
    bracket,
    classification_upper_bound,
    condition_lower_bound,
    distortion_ratio,
    distortion_s_star,
    distortion_threshold,
    refined_bias_bound,
    regime,
    survival_factor,
    variance_bound,
)


class TestBracket:
    def test_means(self):
        b = bracket(1, 1)
        assert b.alpha_bar == b.alpha_tilde == 1
        b = bracket(1, 3)
        assert (b.alpha_bar, b.alpha_tilde, b.ratio) == (1.5, 2.0, 3.0)

    @pytest.mark.parametrize("lo,hi", [(0, 1), (-1, 1), (2, 1)])
    def test_invalid(self, lo, hi):
        with pytest.raises(InvalidBracket):
            bracket(lo, hi)

    def test_ordering_random(self):
        rng = np.random.default_rng(0)
        for lo, w in zip(10 ** rng.uniform(-6, 4, 1000), 10 ** rng.uniform(-6, 4, 1000)):
            b = bracket(lo, lo + w)
            assert b.alpha_L <= b.alpha_bar * (1 + 1e-15)
            assert b.alpha_bar <= b.alpha_tilde * (1 + 1e-15)
            assert b.alpha_tilde <= b.alpha_U


class TestBounds:
    def test_bias_substitution(self):
        n = 50
        assert bias_bound(bracket(n, n), n, 1, 1, 0, 0, 1) == pytest.approx(1.0)
        assert bias_bound(bracket(n, n), n, 1, 1, 1.0, 0, 1) == pytest.approx(2.0)

    def test_bias_capped_near_c_one(self):
        n, lam_p1 = 50, 0.3
        cap = math.sqrt(1.0) * (1 + math.sqrt(n * lam_p1 / n)) * 2.0
        for c in (0.9, 0.999, 1 - 1e-12):
            assert bias_bound(bracket(n, n), n, 1, 1, lam_p1, c, 2.0) <= cap + 1e-12

    def test_c_out_of_range(self):
        with pytest.raises(ValueError):
            bias_bound(bracket(1, 1), 1, 1, 1, 0, 1.0, 1)
        with pytest.raises(ValueError):
            refined_bias_bound(bracket(1, 1), 1, 1, 1, 0, -0.1, 1)

    def test_variance(self):
        assert variance_bound(bracket(2, 2), 10, 1, 0.0, 1.0) == pytest.approx(0.4)
        b = bracket(1, 3)
        assert variance_bound(b, 10, 0, b.alpha_tilde ** 2, 1.0) == pytest.approx(16.0)
        assert variance_bound(b, 10, 5, 3.0, 0.0) == 0.0

    def test_refined(self):
        n = 40
        assert refined_bias_bound(bracket(n, n), n, 1, 1, 0, 0, 1) == 0
        assert refined_bias_bound(bracket(n, n), n, 1, 1, 0, 0.1, 1) == pytest.approx(0.1)
        a = refined_bias_bound(bracket(3, 5), n, 2, 1, 0.01, 0.2, 1.0)
        assert refined_bias_bound(bracket(3, 5), n, 2, 1, 0.01, 0.2, 3.5) == pytest.approx(3.5 * a)

    @given(
        h=st.floats(0, 10), dh=st.floats(0, 10), lp1=st.floats(0, 1), dl=st.floats(0, 1), c=st.floats(0, 0.99)
    )
    def test_monotone(self, h, dh, lp1, dl, c):
        br = bracket(2.0, 7.0)
        for f in (bias_bound, refined_bias_bound):
            base = f(br, 30, 1.5, 1.0, lp1, c, h)
            assert f(br, 30, 1.5, 1.0, lp1, c, h + dh) >= base - 1e-12
            assert f(br, 30, 1.5, 1.0, lp1 + dl, c, h) >= base - 1e-12


class TestSurvival:
    def test_values(self, oracles):
        assert survival_factor(100, 0) == 1.0
        assert survival_factor(100, 100) == 0.5
        ref = oracles["survival_bilevel_100"]
        assert survival_factor(100, 100 ** 0.6) == pytest.approx(ref["s"], rel=1e-14)
        assert ref["s"] == pytest.approx(0.863, abs=5e-4)

    def test_monotone(self):
        vals = [survival_factor(50, a) for a in np.linspace(0, 1000, 200)]
        assert all(0 < v <= 1 for v in vals)
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_classification_bound(self):
        assert classification_upper_bound(0.01, 0.5) == pytest.approx(0.02)
        assert classification_upper_bound(0.0, 0.3) == 0.0
        assert classification_upper_bound(0.7, 1.0) == 0.7
        with pytest.raises(DegenerateSurvival):
            classification_upper_bound(0.1, 0.0)


class TestRegime:
    @pytest.mark.parametrize(
        "beta,r,q,reg,cls",
        [
            (2.6, 0.3, 0.3, Verdict.CONSISTENT, Verdict.CONSISTENT),
            (2.6, 1 / 3, 5 / 6, Verdict.INCONSISTENT, Verdict.CONSISTENT),
            (2.6, 0.3333, 0.8333, Verdict.INCONSISTENT, Verdict.CONSISTENT),
            (2.6, 0.8, 0.45, Verdict.INCONSISTENT, Verdict.UNKNOWN),
        ],
    )
    def test_sweep_configs(self, beta, r, q, reg, cls):
        v = regime(beta, r, q)
        assert (v.regression, v.classification, v.preconditions_met) == (reg, cls, True)

    @pytest.mark.parametrize("beta,r,q", [(2.6, 0.4, 0.6), (2.6, 0.4, 0.9), (2.4, 0.3, 0.9)])
    def test_boundaries_unknown(self, beta, r, q):
        v = regime(beta, r, q)
        assert Verdict.UNKNOWN in (v.regression, v.classification)

    def test_preconditions(self):
        v = regime(1.8, 0.3, 0.3)
        assert not v.preconditions_met and v.regression is Verdict.UNKNOWN

    @given(st.floats(1.01, 5), st.floats(0.01, 0.99), st.floats(0.01, 4))
    def test_implication(self, beta, r, q):
        v = regime(beta, r, q)
        if v.regression is Verdict.CONSISTENT:
            assert v.classification is Verdict.CONSISTENT

    def test_str(self):
        assert str(Verdict.INCONSISTENT) == "Inconsistent"


class TestConditionBound:
    def test_oracle(self, oracles):
        for n, d, tau, ref in oracles["condition_lower_bound"]:
            assert condition_lower_bound(n, d, tau) == pytest.approx(ref, rel=1e-13)
        assert condition_lower_bound(1000, 10**4, 3) == pytest.approx(56.2, rel=0.01)

    def test_n_two(self):
        assert condition_lower_bound(2, 7, 1.5) == pytest.approx(4 / (2 * math.pi**2 * 49 * 2.25))

    def test_monotone(self):
        assert condition_lower_bound(100, 10, 1) > condition_lower_bound(100, 20, 1) > condition_lower_bound(100, 20, 2)


class TestDistortion:
    def test_degenerate(self):
        assert distortion_s_star(1, 1, 1) == (0.5, 0.0)
        for b in (0.01, 1.0, 30.0):
            s, obj = distortion_s_star(2.0, 2.0, b)
            assert s == pytest.approx(2 / (b + 2)) and obj == 0
            assert distortion_ratio(2.0, 2.0, b) == 0

    def test_spec_example(self, oracles):
        l1, lp, b, s, obj = oracles["distortion_example"]
        got = distortion_s_star(l1, lp, b)
        assert got[0] == pytest.approx(s, abs=1e-6)
        assert got[1] == pytest.approx(obj, abs=1e-6)

    def test_pair_oracle(self, oracles):
        for l1, lp, b, s, obj in oracles["distortion_pair"]:
            got_s, got_obj = distortion_s_star(l1, lp, b)
            assert abs(got_s - s) <= 1e-6 and abs(got_obj - obj) <= 1e-6
            assert distortion_ratio(l1, lp, b) == pytest.approx(obj / s, abs=1e-6 / s * 3)

    def test_continuum_oracle(self, oracles):
        for l1, lp, b, s, obj in oracles["distortion_continuum"]:
            assert lp < distortion_threshold(l1, b)
            got_s, got_obj = distortion_s_star(l1, lp, b)
            assert got_obj == pytest.approx(obj, rel=1e-4)
            assert got_s == pytest.approx(s, abs=1e-4)

    def test_large_b_ratio(self):
        l1, lp = 1.0, 0.98
        approx = math.sqrt(lp / l1) * (math.sqrt(l1) - math.sqrt(lp))
        root = math.sqrt(lp * l1)
        limit = root * (math.sqrt(l1) - math.sqrt(lp)) / (l1 + lp - root)
        assert distortion_ratio(l1, lp, 1e8) == pytest.approx(limit, rel=1e-6)
        assert distortion_ratio(l1, lp, 1e8) == pytest.approx(approx, rel=0.02)
        assert approx < 0.01

    @given(st.floats(0.01, 10), st.floats(0.001, 1), st.floats(1e-3, 1e3))
    def test_objective_nonnegative_zero_only_at_equality(self, l1, frac, b):
        lp = l1 * frac
        s, obj = distortion_s_star(l1, lp, b)
        assert obj >= 0
        if frac < 1 - 1e-6:
            assert obj > 0

    def test_invalid(self):
        with pytest.raises(InvalidEigen):
            distortion_s_star(1.0, 2.0, 1.0)
        with pytest.raises(InvalidEigen):
            distortion_s_star(1.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            distortion_s_star(1.0, 0.5, 0.0)
