"""Tests for the periodic spectral solver and its diagnostics."""

import math

import numpy as np
import pytest

from fracheat.errors import InsufficientDataError
from fracheat.pde_solver import (
    Field,
    PeriodicGrid,
    SolverConfig,
    caputo_l1_apply,
    caputo_residual_l1,
    commutation_check,
    decay_measurement,
    gaussian_bump,
    read_field,
    spectral_solve,
    write_field,
)


@pytest.fixture(scope="module")
def grid_1d():
    return PeriodicGrid(dim=1, box_length=200.0, points_per_dim=1024)


@pytest.fixture(scope="module")
def bump_1d(grid_1d):
    return gaussian_bump(grid_1d)


class TestGrid:
    def test_spacing_and_volume(self):
        g = PeriodicGrid(dim=2, box_length=10.0, points_per_dim=64)
        assert g.dx == pytest.approx(10.0 / 64)
        assert g.cell_volume == pytest.approx((10.0 / 64) ** 2)
        assert g.frequencies_squared().shape == (64, 64)

    @pytest.mark.parametrize("kwargs", [
        {"dim": 3, "box_length": 10.0, "points_per_dim": 64},
        {"dim": 1, "box_length": -1.0, "points_per_dim": 64},
        {"dim": 1, "box_length": 10.0, "points_per_dim": 100},  # not power of 2
        {"dim": 1, "box_length": 10.0, "points_per_dim": 32},   # too small
    ])
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            PeriodicGrid(**kwargs)


class TestField:
    def test_shape_and_finiteness_checks(self, grid_1d):
        with pytest.raises(ValueError):
            Field(grid_1d, np.zeros(17))
        bad = np.zeros(grid_1d.points_per_dim)
        bad[0] = np.nan
        with pytest.raises(ValueError):
            Field(grid_1d, bad)

    def test_samples_read_only(self, bump_1d):
        with pytest.raises(ValueError):
            bump_1d.samples[0] = 1.0

    def test_gaussian_l2_norm_matches_analytic(self, grid_1d):
        # ||exp(-x^2/(2 sigma^2))||_2 = (pi sigma^2)^{1/4}
        sigma = 0.5
        f = gaussian_bump(grid_1d, sigma=sigma)
        assert f.norm_lp(2.0) == pytest.approx(
            (math.pi * sigma ** 2) ** 0.25, rel=1e-10)

    def test_norm_validation(self, bump_1d):
        with pytest.raises(ValueError):
            bump_1d.norm_lp(0.5)
        with pytest.raises(ValueError):
            bump_1d.norm_lp(math.inf)

    def test_boundary_mass_fraction_small_for_centered_bump(self, bump_1d):
        assert bump_1d.boundary_mass_fraction() < 1e-12


class TestSolve:
    def test_time_zero_is_identity(self, bump_1d):
        out = spectral_solve(bump_1d, SolverConfig(alpha=0.5), 0.0)
        assert np.max(np.abs(out.samples - bump_1d.samples)) <= 1e-12

    def test_mean_is_conserved(self, bump_1d):
        # the zero mode has multiplier E_alpha(0) = 1
        out = spectral_solve(bump_1d, SolverConfig(alpha=0.5), 5.0)
        assert out.mean() == pytest.approx(bump_1d.mean(), rel=1e-12)

    def test_representations_agree(self, bump_1d):
        for alpha in (0.25, 0.75):
            d = spectral_solve(bump_1d, SolverConfig(alpha=alpha), 1.0)
            s = spectral_solve(
                bump_1d, SolverConfig(alpha=alpha, representation="subordination"), 1.0)
            rel = np.max(np.abs(d.samples - s.samples)) / d.max_norm()
            assert rel <= 1e-9

    def test_alpha_one_matches_heat_kernel(self, grid_1d):
        # exact periodic-free-space agreement while the bump is far from
        # the boundary: Gaussian variance grows by 2t
        sigma, t = 0.5, 2.0
        f = gaussian_bump(grid_1d, sigma=sigma)
        out = spectral_solve(f, SolverConfig(alpha=1.0), t)
        (x,) = grid_1d.coordinates()
        s2 = sigma ** 2 + 2.0 * t
        exact = sigma / math.sqrt(s2) * np.exp(-x ** 2 / (2.0 * s2))
        assert np.max(np.abs(out.samples - exact)) < 1e-12

    def test_subordination_requires_fractional_alpha(self):
        with pytest.raises(ValueError):
            SolverConfig(alpha=1.0, representation="subordination")

    def test_rejects_negative_time(self, bump_1d):
        with pytest.raises(ValueError):
            spectral_solve(bump_1d, SolverConfig(alpha=0.5), -1.0)

    def test_2d_solve_runs(self):
        g = PeriodicGrid(dim=2, box_length=50.0, points_per_dim=128)
        f = gaussian_bump(g)
        out = spectral_solve(f, SolverConfig(alpha=0.5), 1.0)
        assert out.max_norm() < f.max_norm()
        assert out.mean() == pytest.approx(f.mean(), rel=1e-12)


class TestCommutation:
    def test_multiplier_commutes_with_laplacian(self, grid_1d):
        # a wider bump keeps the spectrum band-limited on the 1024 grid
        smooth = gaussian_bump(grid_1d, sigma=1.5)
        assert commutation_check(smooth, SolverConfig(alpha=0.5), 1.0) < 1e-12

    def test_rejects_non_band_limited_data(self, grid_1d):
        rng = np.random.default_rng(0)
        noisy = Field(grid_1d, rng.standard_normal(grid_1d.points_per_dim))
        with pytest.raises(ValueError):
            commutation_check(noisy, SolverConfig(alpha=0.5), 1.0)


class TestFieldIO:
    def test_round_trip_is_exact(self, bump_1d, tmp_path):
        path = tmp_path / "field.bin"
        write_field(bump_1d, path, time=2.5)
        restored, t = read_field(path)
        assert t == 2.5
        assert restored.grid == bump_1d.grid
        assert np.array_equal(restored.samples, bump_1d.samples)

    def test_2d_round_trip(self, tmp_path):
        g = PeriodicGrid(dim=2, box_length=20.0, points_per_dim=64)
        f = gaussian_bump(g, sigma=1.0)
        path = tmp_path / "f2d.bin"
        write_field(f, path)
        restored, t = read_field(path)
        assert t == 0.0
        assert np.array_equal(restored.samples, f.samples)


class TestCaputo:
    def test_l1_weights_reproduce_linear_solution(self):
        # D^alpha of t is t^{1-alpha}/Gamma(2-alpha); the L1 scheme is
        # exact on piecewise-linear functions
        alpha = 0.5
        t = np.linspace(0.0, 2.0, 33)
        deriv = caputo_l1_apply(alpha, t, t[1] - t[0])
        exact = t[1:] ** (1.0 - alpha) / math.gamma(2.0 - alpha)
        assert np.max(np.abs(deriv - exact)) < 1e-12

    def test_residual_refines_at_first_order(self):
        r_coarse = caputo_residual_l1(0.5, 1.0, np.linspace(0.0, 2.0, 129))
        r_fine = caputo_residual_l1(0.5, 1.0, np.linspace(0.0, 2.0, 257))
        assert math.log2(r_coarse / r_fine) >= 1.0

    def test_alpha_one_backward_difference(self):
        r = caputo_residual_l1(1.0, 1.0, np.linspace(0.0, 2.0, 257))
        assert r < 0.01  # O(dt) defect of the backward difference on e^{-t}

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            caputo_residual_l1(0.5, 1.0, np.linspace(0.1, 2.0, 64))  # no 0
        with pytest.raises(ValueError):
            caputo_residual_l1(0.5, 1.0, np.linspace(0.0, 0.5, 64))  # too short
        with pytest.raises(ValueError):
            caputo_residual_l1(0.5, -1.0, np.linspace(0.0, 2.0, 64))


class TestDecayMeasurement:
    def test_compensated_ratio_monotone(self):
        g = PeriodicGrid(dim=1, box_length=200.0, points_per_dim=2048)
        f = gaussian_bump(g)
        m = decay_measurement(f, SolverConfig(alpha=0.5), 4.0 / 3.0, 4.0,
                              list(np.geomspace(5.0, 100.0, 8)))
        assert m.compensated_monotone
        assert m.lambda_exp == 0.5
        assert m.delta == pytest.approx(0.5)
        assert m.truncated_at is None

    def test_wraparound_truncates_with_warning(self):
        g = PeriodicGrid(dim=1, box_length=40.0, points_per_dim=256)
        f = gaussian_bump(g)
        with pytest.warns(RuntimeWarning, match="wraparound"):
            m = decay_measurement(f, SolverConfig(alpha=1.0), 4.0 / 3.0, 4.0,
                                  list(np.geomspace(0.5, 200.0, 12)))
        assert m.truncated_at is not None

    def test_too_few_usable_times_raises(self):
        g = PeriodicGrid(dim=1, box_length=40.0, points_per_dim=256)
        f = gaussian_bump(g)
        with pytest.warns(RuntimeWarning):
            with pytest.raises(InsufficientDataError):
                decay_measurement(f, SolverConfig(alpha=1.0), 4.0 / 3.0, 4.0,
                                  [1.0, 50.0, 100.0, 200.0, 400.0, 800.0])

    def test_validation(self):
        g = PeriodicGrid(dim=1, box_length=40.0, points_per_dim=256)
        f = gaussian_bump(g)
        with pytest.raises(ValueError):
            decay_measurement(f, SolverConfig(alpha=0.5), 3.0, 4.0, [1, 2, 3, 4, 5])
        with pytest.raises(ValueError):
            decay_measurement(f, SolverConfig(alpha=0.5), 4.0 / 3.0, 4.0,
                              [2.0, 1.0, 3.0, 4.0, 5.0])
