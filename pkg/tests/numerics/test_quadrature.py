"""
Test Suite for Quadrature Module

Unit tests for the Riemann and Clenshaw-Curtis rules on [-L/2, 0].

Key Testing Objectives:
- Validate node layout (ascending, endpoints exact)
- Check weight sums and exactness on polynomials
- Confirm spectral accuracy of Clenshaw-Curtis on smooth integrands
- Reject inadmissible L and M
"""

import math

import numpy as np
import pytest

from kpsolver.numerics.quadrature import (
    QuadratureError,
    RuleKind,
    clenshaw_curtis_rule,
    clenshaw_curtis_weights,
    make_rule,
    riemann_rule,
)

L = 10 * math.pi


class TestRiemannRule:
    """Tests for riemann_rule."""

    def test_layout(self):
        rule = riemann_rule(L, 8)
        assert rule.size == 5
        assert rule.M == 8
        assert rule.nodes[0] == -L / 2
        assert rule.nodes[-1] == 0.0
        np.testing.assert_allclose(np.diff(rule.nodes), L / 8)

    def test_constant_weights(self):
        rule = riemann_rule(L, 16)
        assert np.all(rule.weights == L / 16)

    def test_first_order_convergence(self):
        """Error of the exponential integral halves with M."""
        exact = 1.0 - math.exp(-1.0)
        errors = [abs(riemann_rule(2.0, M).integrate(np.exp) - exact) for M in (64, 128)]
        assert errors[1] == pytest.approx(errors[0] / 2, rel=0.05)

    def test_read_only(self):
        rule = riemann_rule(L, 4)
        with pytest.raises(ValueError):
            rule.nodes[0] = 1.0


class TestClenshawCurtis:
    """Tests for clenshaw_curtis_weights and clenshaw_curtis_rule."""

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 7, 16, 64])
    def test_reference_weights_sum(self, n):
        w = clenshaw_curtis_weights(n)
        assert w.sum() == pytest.approx(2.0, abs=1e-13)
        assert np.all(w > 0)

    def test_small_weights(self):
        np.testing.assert_allclose(clenshaw_curtis_weights(1), [1.0, 1.0])
        np.testing.assert_allclose(clenshaw_curtis_weights(2), [1 / 3, 4 / 3, 1 / 3])

    @pytest.mark.parametrize("M", [2, 16, 128])
    def test_weight_sum_is_half_length(self, M):
        rule = clenshaw_curtis_rule(L, M)
        assert rule.weights.sum() == pytest.approx(L / 2, rel=1e-13)

    def test_endpoints(self):
        rule = clenshaw_curtis_rule(L, 32)
        assert rule.nodes[0] == -L / 2
        assert rule.nodes[-1] == 0.0
        assert np.all(np.diff(rule.nodes) > 0)

    def test_weights_symmetric(self):
        rule = clenshaw_curtis_rule(2.0, 20)
        np.testing.assert_allclose(rule.weights, rule.weights[::-1], rtol=1e-13)

    @pytest.mark.parametrize("k", range(9))
    def test_polynomial_exactness(self, k):
        """Eight panels on [-1, 0] integrate x^k exactly up to degree 8."""
        rule = clenshaw_curtis_rule(2.0, 16)
        exact = (-1.0) ** k / (k + 1)
        assert rule.integrate(lambda x: x**k) == pytest.approx(exact, abs=1e-14)

    def test_spectral_accuracy(self):
        exact = 1.0 - math.exp(-1.0)
        assert clenshaw_curtis_rule(2.0, 32).integrate(np.exp) == pytest.approx(
            exact, abs=1e-14
        )


class TestRuleValidation:
    """Tests for argument checks shared by both rules."""

    @pytest.mark.parametrize("factory", [riemann_rule, clenshaw_curtis_rule])
    @pytest.mark.parametrize("M", [0, 1, 3, -2, 2.5])
    def test_bad_M(self, factory, M):
        with pytest.raises(QuadratureError):
            factory(L, M)

    @pytest.mark.parametrize("factory", [riemann_rule, clenshaw_curtis_rule])
    @pytest.mark.parametrize("length", [0.0, -1.0, math.inf, math.nan])
    def test_bad_length(self, factory, length):
        with pytest.raises(QuadratureError):
            factory(length, 8)

    def test_make_rule(self):
        assert make_rule(RuleKind.RIEMANN, L, 4).kind is RuleKind.RIEMANN
        assert make_rule("clenshaw-curtis", L, 4).kind is RuleKind.CLENSHAW_CURTIS
