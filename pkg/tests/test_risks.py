import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from interplab.errors import ProbabilityOutOfRange, ZeroTarget
from interplab.estimator import DualWeights, SampleSet, gram_matrix, predict, ridge_solve, uniform_samples
from interplab.kernels import FourierKernel
from interplab.risks import (
    RiskRecord,
    TargetFunction,
    binary_labels,
    excess_classification_risk,
    excess_risk_from_values,
    gaussian_observations,
    generate_target,
    normalization_grid_size,
    relative_l2_error,
)
from interplab.spectra import BiLevelParams


def fitted(seed, n=100, beta=2.6, r=0.3, q=0.3, alpha=1e-3):
    prm = BiLevelParams(n, beta, r, q)
    k = FourierKernel.from_params(prm)
    s = uniform_samples(n, seed)
    t = generate_target(prm.p, seed + 1)
    obs = gaussian_observations(t, s, 1.0, seed + 2)
    return k, t, ridge_solve(gram_matrix(k, s), obs.y, alpha, s)


class TestTarget:
    def test_constant_target(self):
        for seed in range(5):
            t = generate_target(0, seed)
            assert abs(t(np.linspace(0, 1, 7))).max() == pytest.approx(1.0, abs=1e-15)
            assert np.ptp(t(np.linspace(0, 1, 7))) == 0

    def test_real_valued(self):
        t = generate_target(12, 3)
        x = np.arange(1000) / 1000
        assert np.max(np.abs(t.evaluate_complex(x).imag)) <= 1e-12
        np.testing.assert_allclose(t(x), t.evaluate_complex(x).real, atol=1e-13)

    def test_deterministic(self):
        a, b = generate_target(9, 123), generate_target(9, 123)
        assert np.array_equal(a.coefficients, b.coefficients)

    @pytest.mark.parametrize("p", [1, 3, 10, 40, 251])
    def test_normalized_peak(self, p):
        t = generate_target(p, p)
        g = normalization_grid_size(p)
        grid_max = np.abs(t(np.arange(g) / g)).max()
        dense = np.abs(t(np.arange(16 * g) / (16 * g))).max()
        assert abs(t(t.peak_location)) == pytest.approx(1.0, abs=1e-12)
        assert 0.99 < grid_max <= 1.0 + 1e-12
        assert dense <= 1.0 + 1e-12

    def test_grid_size(self):
        assert normalization_grid_size(3) == 4096
        assert normalization_grid_size(500) == 32 * 1001

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            TargetFunction(np.array([1.0, 0.0, 2.0]))

    def test_parseval(self):
        t = generate_target(6, 4)
        x = (np.arange(4096) + 0.5) / 4096
        assert t.l2_norm_sq == pytest.approx(np.mean(t(x) ** 2), rel=1e-12)


class TestObservations:
    def test_noiseless(self):
        t = generate_target(4, 0)
        s = uniform_samples(30, 1)
        obs = gaussian_observations(t, s, 0.0, 2)
        assert np.array_equal(obs.y, t(s.x))

    def test_noise_variance(self):
        t = generate_target(2, 0)
        s = uniform_samples(100_000, 1)
        obs = gaussian_observations(t, s, 0.7, 2)
        assert np.var(obs.y - t(s.x)) == pytest.approx(0.49, rel=0.02)
        np.testing.assert_array_equal(obs.y, t(s.x) + obs.noise)

    def test_reproducible(self):
        t, s = generate_target(2, 0), uniform_samples(10, 1)
        assert np.array_equal(gaussian_observations(t, s, 1.0, 5).y, gaussian_observations(t, s, 1.0, 5).y)
        assert np.array_equal(binary_labels(t, s, 5).y, binary_labels(t, s, 5).y)

    def test_labels_at_extremes(self):
        t = generate_target(3, 8)
        top = SampleSet([t.peak_location] * 50)
        sign = np.sign(t(t.peak_location))
        assert np.all(binary_labels(t, top, 0).y == sign)
        flipped = TargetFunction(-t.coefficients)
        assert np.all(binary_labels(flipped, top, 0).y == -sign)

    def test_label_mean(self):
        t = generate_target(3, 2)
        x0 = 0.37
        ys = binary_labels(t, SampleSet(np.full(100_000, x0)), 4).y
        assert set(np.unique(ys)) <= {-1.0, 1.0}
        assert ys.mean() == pytest.approx(t(x0), abs=0.02)

    def test_out_of_range(self):
        with pytest.raises(ProbabilityOutOfRange):
            binary_labels(TargetFunction(np.array([1.5])), SampleSet([0.1]), 0)


class TestRelativeL2:
    def test_zero_weights(self):
        t = generate_target(3, 1)
        w = DualWeights(np.zeros(5), 0.0, uniform_samples(5, 0))
        assert relative_l2_error(w, FourierKernel(3, 50, 0.1), t) == pytest.approx(1.0, abs=1e-10)

    def test_perfect_estimate(self):
        # trigonometric interpolation on 2p+1 equispaced nodes reproduces a degree-p target
        p = 4
        t = generate_target(p, 0)
        nodes = SampleSet(np.arange(2 * p + 1) / (2 * p + 1))
        w = DualWeights(t(nodes.x) / (2 * p + 1), 0.0, nodes)
        assert relative_l2_error(w, FourierKernel(p, 50, 1e-12), t) < 1e-20

    def test_zero_target(self):
        with pytest.raises(ZeroTarget):
            relative_l2_error(DualWeights(np.zeros(2), 0, uniform_samples(2, 0)), FourierKernel(1, 5, 0.5), TargetFunction(np.zeros(3)))

    def test_matches_quadrature(self):
        k, t, w = fitted(0, beta=1.9)
        u = (np.arange(16384) + 0.5) / 16384
        quad = np.mean((predict(w, k, u) - t(u)) ** 2) / np.mean(t(u) ** 2)
        assert relative_l2_error(w, k, t) == pytest.approx(quad, rel=1e-3)


class TestExcessRisk:
    def test_from_values(self):
        eta = np.array([0.5, -0.2, 0.1, -0.9])
        assert excess_risk_from_values(eta, eta) == 0.0
        assert excess_risk_from_values(-eta, eta) == 1.0
        assert excess_risk_from_values(0.5 * eta, eta) == 0.0
        assert excess_risk_from_values([0.0, 0.0, 0.0, 0.0], eta) == pytest.approx(1.1 / 1.7)

    def test_zero_target(self):
        with pytest.raises(ZeroTarget):
            excess_risk_from_values([1.0], [0.0])

    def test_scale_invariant(self):
        k, t, w = fitted(3)
        base = excess_classification_risk(w, k, t)
        for c in (0.1, 10.0):
            assert excess_classification_risk(w.scaled(c), k, t) == base

    def test_range_and_grid_stability(self):
        for seed in range(4):
            k, t, w = fitted(seed)
            a = excess_classification_risk(w, k, t, 8192)
            b = excess_classification_risk(w, k, t, 16384)
            assert 0 <= a <= 1 + 2 / 8192
            assert abs(a - b) <= 5e-3

    def test_small_grid_rejected(self):
        k, t, w = fitted(0)
        with pytest.raises(ValueError):
            excess_classification_risk(w, k, t, 512)

    @given(st.lists(st.floats(-1, 1), min_size=1, max_size=50), st.floats(1e-3, 1e3))
    @settings(max_examples=200)
    def test_values_scale_property(self, vals, c):
        eta = np.array(vals)
        if not np.abs(eta).sum():
            return
        hat = np.roll(eta, 1) - 0.1
        assert excess_risk_from_values(c * hat, eta) == excess_risk_from_values(hat, eta)


def test_record_defaults():
    rec = RiskRecord("x", "gaussian", 10, 0, 1, 1e-3, 0.5, 0.1)
    assert rec.cond_RRstar is None and rec.c_value is None and rec.resamples == 0
