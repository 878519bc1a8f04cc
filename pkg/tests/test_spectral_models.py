"""Tests for the spectral surrogates and their trace/condition checks."""

import math
import warnings

import numpy as np
import pytest

from fracheat.errors import InsufficientDataError
from fracheat.spectral_models import (
    DEFAULT_CATALOG,
    DiscreteSpectrum,
    PowerLawSpectrum,
    SpectralModel,
    condition_supremum,
    models_from_json,
    models_to_json,
    torus_laplacian_1d,
    torus_laplacian_2d,
    trace_counting,
    verify_sectorial,
    verify_trace_growth,
)
from fracheat.decay_analysis import sup_heat_closed_form


class TestSpectrumTypes:
    def test_discrete_validation(self):
        with pytest.raises(ValueError):
            DiscreteSpectrum((), ())
        with pytest.raises(ValueError):
            DiscreteSpectrum((1.0, 0.5), (1, 1))  # not ascending
        with pytest.raises(ValueError):
            DiscreteSpectrum((-1.0,), (1,))  # nonpositive
        with pytest.raises(ValueError):
            DiscreteSpectrum((1.0,), (0,))  # bad multiplicity
        with pytest.raises(ValueError):
            DiscreteSpectrum((1.0, 2.0), (1,))  # length mismatch

    def test_power_law_validation(self):
        with pytest.raises(ValueError):
            PowerLawSpectrum(c=0.0, lambda_exp=1.0)
        with pytest.raises(ValueError):
            PowerLawSpectrum(c=1.0, lambda_exp=-1.0)

    def test_is_discrete(self):
        assert torus_laplacian_1d(10).is_discrete
        assert not SpectralModel(PowerLawSpectrum(1.0, 1.0)).is_discrete


class TestTraceCounting:
    def test_power_law_exact(self):
        m = SpectralModel(PowerLawSpectrum(c=2.0, lambda_exp=1.5))
        assert trace_counting(m, 4.0) == pytest.approx(2.0 * 4.0 ** 1.5)

    def test_discrete_counts_below_threshold(self):
        m = SpectralModel(DiscreteSpectrum((1.0, 4.0, 9.0), (2, 2, 2)))
        assert trace_counting(m, 0.5) == 0.0
        assert trace_counting(m, 4.0) == 2.0  # strict inequality
        assert trace_counting(m, 100.0) == 6.0

    def test_rejects_nonpositive_s(self):
        with pytest.raises(ValueError):
            trace_counting(torus_laplacian_1d(10), 0.0)


class TestTraceGrowth:
    def test_torus_1d_weyl_slope(self):
        report = verify_trace_growth(torus_laplacian_1d(2000), 0.5, (1.0, 1e6))
        assert report.within_10_percent

    def test_torus_2d_weyl_slope(self):
        report = verify_trace_growth(torus_laplacian_2d(120), 1.0, (2.0, 8000.0))
        assert report.within_10_percent

    def test_power_law_exact_slope(self):
        for entry in DEFAULT_CATALOG:
            report = verify_trace_growth(entry.model(), entry.lambda_exp, (1.0, 1e6))
            assert report.fitted_slope == pytest.approx(entry.lambda_exp, rel=1e-12)

    def test_requires_three_decades(self):
        with pytest.raises(ValueError):
            verify_trace_growth(torus_laplacian_1d(100), 0.5, (1.0, 100.0))

    def test_sparse_spectrum_raises(self):
        m = SpectralModel(DiscreteSpectrum((1e7,), (1,)))
        with pytest.raises(InsufficientDataError):
            verify_trace_growth(m, 0.5, (1.0, 1e4))


class TestSectorial:
    @pytest.mark.parametrize("phi", [math.pi / 6, math.pi / 4, math.pi / 3])
    def test_single_eigenvalue_matches_inverse_sine(self, phi):
        m = SpectralModel(DiscreteSpectrum((1.0,), (1,)))
        assert verify_sectorial(m, phi) == pytest.approx(1.0 / math.sin(phi), rel=1e-3)

    def test_requires_discrete(self):
        with pytest.raises(ValueError):
            verify_sectorial(SpectralModel(PowerLawSpectrum(1.0, 1.0)), 0.5)

    def test_rejects_bad_angle(self):
        m = torus_laplacian_1d(10)
        with pytest.raises(ValueError):
            verify_sectorial(m, 0.0)
        with pytest.raises(ValueError):
            verify_sectorial(m, math.pi)


class TestConditionSupremum:
    def test_heat_kernel_power_law_matches_closed_form(self):
        # tau(s) = s, delta = 1/2: sup s^{1/2} e^{-ts} has a closed form
        m = SpectralModel(PowerLawSpectrum(c=1.0, lambda_exp=1.0))
        for t in (0.5, 2.0, 10.0):
            got = condition_supremum(m, 4.0 / 3.0, 4.0, 0.5, t, "heat")
            assert got == pytest.approx(sup_heat_closed_form(0.5, t), rel=1e-8)

    def test_direct_route_finite_at_endpoint_exponent(self):
        # tau(s)^delta E_alpha(-t^alpha s) with lambda*delta = 1 stays
        # bounded: the multiplier decays exactly as 1/s
        m = SpectralModel(PowerLawSpectrum(c=1.0, lambda_exp=2.0))
        got = condition_supremum(m, 4.0 / 3.0, 4.0, 0.5, 1.0, "direct_ml")
        assert math.isfinite(got)

    def test_divergence_reported_as_inf_with_warning(self):
        # lambda*delta = 2 > 1: the objective grows without bound
        m = SpectralModel(PowerLawSpectrum(c=1.0, lambda_exp=4.0))
        with pytest.warns(RuntimeWarning):
            got = condition_supremum(m, 4.0 / 3.0, 4.0, 0.5, 1.0, "direct_ml")
        assert math.isinf(got)

    def test_validation(self):
        m = SpectralModel(PowerLawSpectrum(1.0, 1.0))
        with pytest.raises(ValueError):
            condition_supremum(m, 4.0 / 3.0, 4.0, 0.5, 1.0, "bogus")
        with pytest.raises(ValueError):
            condition_supremum(m, 3.0, 4.0, 0.5, 1.0)  # p > 2
        with pytest.raises(ValueError):
            condition_supremum(m, 4.0 / 3.0, 4.0, 0.5, -1.0)


class TestCatalog:
    def test_expected_entries(self):
        labels = {e.name for e in DEFAULT_CATALOG}
        assert "euclidean-laplacian-1d" in labels
        assert "heisenberg-sublaplacian-n1" in labels
        assert all(e.lambda_exp > 0 for e in DEFAULT_CATALOG)

    def test_euclidean_exponents_are_half_dimension(self):
        by_name = {e.name: e for e in DEFAULT_CATALOG}
        for n in (1, 2, 3):
            assert by_name[f"euclidean-laplacian-{n}d"].lambda_exp == n / 2


class TestJsonRoundTrip:
    def test_round_trip_preserves_models(self):
        models = [
            torus_laplacian_1d(5),
            SpectralModel(PowerLawSpectrum(c=3.0, lambda_exp=1.5), label="pl"),
        ]
        restored = models_from_json(models_to_json(models))
        assert restored == models

    def test_unknown_variant_rejected(self):
        with pytest.raises(ValueError):
            models_from_json('[{"label": "x", "variant": "mystery", "parameters": {}}]')

    def test_output_is_deterministic(self):
        models = [torus_laplacian_2d(5)]
        assert models_to_json(models) == models_to_json(models)
