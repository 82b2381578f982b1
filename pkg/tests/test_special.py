"""Tests for the log-domain Gamma-family primitives.

Anchor values are classical identities (Gamma(1/2) = sqrt(pi), B(2,2) = 1/6)
frozen from a 40-digit mpmath evaluation; the bulk accuracy check compares
against mpmath directly.
"""

import mpmath as mp
import numpy as np
import pytest

from betabo.special import (
    duplication_identity_residual,
    log_beta_fn,
    log_gamma,
    wendel_ratio_bounds,
)

mp.mp.dps = 40


class TestLogGamma:
    def test_integer_anchors(self):
        assert log_gamma(1.0) == 0.0
        np.testing.assert_allclose(log_gamma(5.0), np.log(24.0), rtol=1e-15)

    def test_half_integer_anchor(self):
        # Gamma(1/2) = sqrt(pi), cross-checked against mpmath
        np.testing.assert_allclose(log_gamma(0.5), 0.5723649429247001, rtol=1e-14)

    def test_against_high_precision(self):
        rng = np.random.default_rng(0)
        x = np.exp(rng.uniform(np.log(1e-6), np.log(1e6), size=300))
        exact = np.array([float(mp.loggamma(v)) for v in x])
        np.testing.assert_allclose(log_gamma(x), exact, rtol=1e-12, atol=1e-12)

    def test_recurrence(self):
        rng = np.random.default_rng(1)
        x = rng.uniform(1e-9, 100.0, size=1000)
        resid = np.abs(log_gamma(x + 1.0) - log_gamma(x) - np.log(x))
        assert np.max(resid) <= 1e-10

    @pytest.mark.parametrize("bad", [0.0, -1.0, -0.5])
    def test_rejects_nonpositive(self, bad):
        with pytest.raises(ValueError):
            log_gamma(bad)


class TestLogBetaFn:
    def test_anchors(self):
        assert log_beta_fn(1.0, 1.0) == 0.0
        np.testing.assert_allclose(log_beta_fn(2.0, 2.0), np.log(1.0 / 6.0), rtol=1e-14)
        np.testing.assert_allclose(log_beta_fn(0.5, 0.5), np.log(np.pi), rtol=1e-14)

    def test_symmetry_exact(self):
        rng = np.random.default_rng(2)
        a = rng.uniform(0.1, 50.0, size=200)
        b = rng.uniform(0.1, 50.0, size=200)
        assert np.all(log_beta_fn(a, b) == log_beta_fn(b, a))

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            log_beta_fn(0.0, 1.0)
        with pytest.raises(ValueError):
            log_beta_fn(1.0, -2.0)


class TestDuplicationIdentity:
    def test_at_zero(self):
        # both sides equal ln 1 = 0 exactly in exact arithmetic; float
        # rounding of the ln(pi)/2 constant leaves one ulp
        assert duplication_identity_residual(0.0) <= 2e-16

    def test_point_examples(self):
        assert duplication_identity_residual(1.0) <= 1e-12
        assert duplication_identity_residual(10.0) <= 1e-10

    def test_grid(self):
        x = np.arange(0.0, 50.0 + 1e-9, 0.01)
        assert np.max(duplication_identity_residual(x)) <= 1e-10

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            duplication_identity_residual(-0.1)


class TestWendelBounds:
    def test_at_zero(self):
        lower, ratio, upper = wendel_ratio_bounds(0.0)
        np.testing.assert_allclose(lower, np.sqrt(2.0), rtol=1e-15)
        np.testing.assert_allclose(ratio, np.sqrt(np.pi), rtol=1e-14)
        assert upper == 2.0

    def test_at_one(self):
        lower, ratio, _ = wendel_ratio_bounds(1.0)
        np.testing.assert_allclose(lower, np.sqrt(2.0 / 3.0), rtol=1e-15)
        np.testing.assert_allclose(ratio, np.sqrt(np.pi) / 2.0, rtol=1e-14)

    def test_at_hundred(self):
        lower, ratio, upper = wendel_ratio_bounds(100.0)
        np.testing.assert_allclose(lower, 0.09975093361076329, rtol=1e-14)
        np.testing.assert_allclose(ratio, 0.09987507861262518, rtol=1e-12)
        assert lower <= ratio <= upper

    def test_ordering_on_grid(self):
        x = np.arange(0.0, 50.0 + 1e-9, 0.01)
        lower, ratio, upper = wendel_ratio_bounds(x)
        assert np.all(lower <= ratio)
        assert np.all(ratio <= upper)
