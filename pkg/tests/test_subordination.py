"""Tests for the Wright-density quadrature layer.

Closed-form targets (Gamma-function ratios) are computed with the
standard library; the quadrature must reproduce them independently.
"""

import math

import numpy as np
import pytest

from fracheat.errors import QuadratureError
from fracheat.special_functions import mittag_leffler_neg
from fracheat.subordination import (
    DEFAULT_QUAD,
    QuadratureSpec,
    dirac_limit_check,
    endpoint_divergence_profile,
    subordinate_scalar,
    subordination_constant,
    wright_mass_nodes,
    wright_moment,
)

# frozen from 50-digit arbitrary-precision evaluation
E_QUARTER_AT_1 = 0.46385276080171328694
E_HALF_AT_1 = 0.42758357615580700441


class TestQuadratureSpec:
    def test_defaults(self):
        assert DEFAULT_QUAD.tail_policy == "exponential_extrapolation"

    @pytest.mark.parametrize("kwargs", [
        {"upper_cut": 0.5},
        {"panels": 2},
        {"nodes_per_panel": 1},
        {"tail_policy": "ignore"},
        {"target_tol": 0.0},
    ])
    def test_rejects_bad_parameters(self, kwargs):
        with pytest.raises(ValueError):
            QuadratureSpec(**kwargs)


class TestMassNodes:
    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75, 0.9])
    def test_total_mass_is_one(self, alpha):
        nodes, mass = wright_mass_nodes(alpha)
        assert nodes.shape == mass.shape
        assert np.all(np.diff(nodes) > 0.0)
        assert float(mass.sum()) == pytest.approx(1.0, abs=1e-9)

    def test_rejects_alpha_one(self):
        with pytest.raises(ValueError):
            wright_mass_nodes(1.0)


class TestSubordinateScalar:
    def test_reproduces_mittag_leffler(self):
        assert subordinate_scalar(0.25, 1.0) == pytest.approx(
            E_QUARTER_AT_1, abs=1e-10)
        assert subordinate_scalar(0.5, 1.0) == pytest.approx(
            E_HALF_AT_1, abs=1e-10)

    def test_identity_across_arguments(self):
        for alpha in (0.25, 0.5, 0.75):
            for x in np.logspace(-3, 2, 12):
                sub = subordinate_scalar(alpha, float(x))
                direct = mittag_leffler_neg(alpha, float(x))
                assert sub == pytest.approx(direct, abs=1e-10)

    def test_x_zero_gives_total_mass(self):
        assert subordinate_scalar(0.5, 0.0) == pytest.approx(1.0, abs=1e-10)

    def test_rejects_negative_x(self):
        with pytest.raises(ValueError):
            subordinate_scalar(0.5, -1.0)

    def test_neglect_policy_rejects_heavy_tail(self):
        # a cut far below the density support leaves a tail the neglect
        # policy must refuse to drop silently
        spec = QuadratureSpec(upper_cut=1.5, panels=8, nodes_per_panel=8,
                              tail_policy="neglect_with_bound", target_tol=1e-10)
        with pytest.raises(QuadratureError):
            subordinate_scalar(0.9, 1.0, spec)


class TestMoments:
    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    @pytest.mark.parametrize("gamma", [-0.5, 0.0, 0.5, 1.0, 2.0, 3.0])
    def test_moment_identity(self, alpha, gamma):
        numeric = wright_moment(alpha, gamma)
        exact = math.gamma(gamma + 1.0) / math.gamma(gamma * alpha + 1.0)
        assert numeric == pytest.approx(exact, rel=1e-8)

    def test_frozen_value(self):
        # Gamma(0.5)/Gamma(0.75)
        assert wright_moment(0.5, -0.5) == pytest.approx(
            1.4464090846320771425, rel=1e-9)

    def test_rejects_divergent_gamma(self):
        with pytest.raises(ValueError):
            wright_moment(0.5, -1.0)
        with pytest.raises(ValueError):
            wright_moment(0.5, -1.5)


class TestSubordinationConstant:
    def test_gamma_ratio(self):
        # Gamma(1-beta)/Gamma(1-alpha*beta) at alpha=0.5, beta=0.8
        assert subordination_constant(0.5, 0.8) == pytest.approx(
            3.0827743803116220049, rel=1e-8)

    def test_increases_toward_endpoint(self):
        values = [subordination_constant(0.5, b) for b in (0.8, 0.9, 0.95)]
        assert values[0] < values[1] < values[2]

    @pytest.mark.parametrize("beta", [0.0, 1.0, 1.2, -0.5])
    def test_rejects_beta_outside_open_interval(self, beta):
        with pytest.raises(ValueError):
            subordination_constant(0.5, beta)


class TestEndpointDivergence:
    def test_slope_matches_density_at_zero(self):
        eps = list(np.logspace(-2, -5, 8))
        prof = endpoint_divergence_profile(0.5, eps)
        assert prof.expected_slope == pytest.approx(
            1.0 / math.gamma(0.5), rel=1e-14)
        assert prof.slope == pytest.approx(prof.expected_slope, rel=0.05)

    def test_integral_grows_as_eps_shrinks(self):
        prof = endpoint_divergence_profile(0.25, [1e-2, 1e-3, 1e-4])
        assert prof.integral[0] < prof.integral[1] < prof.integral[2]

    def test_validation(self):
        with pytest.raises(ValueError):
            endpoint_divergence_profile(0.5, [1e-2])  # too few
        with pytest.raises(ValueError):
            endpoint_divergence_profile(0.5, [1e-4, 1e-2])  # not decreasing
        with pytest.raises(ValueError):
            endpoint_divergence_profile(0.5, [2.0, 0.5])  # out of range


class TestDiracLimit:
    def test_error_shrinks_as_alpha_approaches_one(self):
        alphas = [0.9, 0.99, 0.995]
        rows = dirac_limit_check(alphas, lambda s: np.exp(-s))
        errors = [r.abs_error for r in rows]
        assert errors[0] > errors[1] > errors[2]
        assert rows[0].limit == pytest.approx(math.exp(-1.0))

    def test_polynomial_test_function(self):
        rows = dirac_limit_check([0.9, 0.99], lambda s: s ** 2)
        assert rows[0].abs_error > rows[1].abs_error
        assert rows[1].integral == pytest.approx(1.0, abs=0.05)

    def test_rejects_alpha_one(self):
        with pytest.raises(ValueError):
            dirac_limit_check([1.0], lambda s: s)
