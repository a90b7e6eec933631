import math

import numpy as np
import pytest

from essmodes.numerics import (Grid1D, QuadratureError, QuadratureSpec,
                               chi_square_p_value, gaussian_moment,
                               integrate_1d, integrate_radial_3d,
                               trapezoid_weights)

SQRT_PI = math.sqrt(math.pi)


class TestIntegrate1D:
    def test_gaussian_over_real_line(self):
        value, err = integrate_1d(lambda t: np.exp(-t * t), -math.inf, math.inf)
        assert abs(value - SQRT_PI) <= max(1e-10, err)

    def test_zero_integrand_is_exact(self):
        value, err = integrate_1d(lambda t: np.zeros_like(t), 0.0, 1.0)
        assert value == 0.0
        assert err == 0.0

    def test_second_moment(self):
        value, _ = integrate_1d(lambda t: t * t * np.exp(-t * t), -math.inf, math.inf)
        assert value == pytest.approx(SQRT_PI / 2.0, abs=1e-10)

    @pytest.mark.parametrize("n,a", [(0, 1.0), (2, 1.0), (2, 3.0), (4, 2.0), (6, 0.5)])
    def test_agrees_with_moment_closed_form(self, n, a):
        value, err = integrate_1d(lambda t: t ** n * np.exp(-a * t * t),
                                  -math.inf, math.inf)
        exact = gaussian_moment(n, a)
        assert abs(value - exact) <= 1e-10 * exact
        # The reported estimate must bound the true error.
        assert abs(value - exact) <= err

    def test_half_infinite_interval(self):
        value, _ = integrate_1d(lambda t: np.exp(-t), 0.0, math.inf)
        assert value == pytest.approx(1.0, abs=1e-10)

    def test_complex_integrand(self):
        value, _ = integrate_1d(lambda t: np.exp(-t * t) * (1.0 + 2.0j),
                                -math.inf, math.inf)
        assert value == pytest.approx(SQRT_PI * (1.0 + 2.0j), abs=1e-10)

    def test_concentrated_bump_is_found(self):
        # Narrow Gaussian far from the initial panel centers.
        value, _ = integrate_1d(lambda t: np.exp(-1e6 * (t - 0.3) ** 2), -1.0, 1.0)
        assert value == pytest.approx(SQRT_PI * 1e-3, rel=1e-9)

    def test_budget_exhaustion_raises_with_best_estimate(self):
        spec = QuadratureSpec(max_panels=64)
        with pytest.raises(QuadratureError) as excinfo:
            integrate_1d(lambda t: np.abs(t) ** -0.5, 1e-30, 1.0, spec)
        assert math.isfinite(excinfo.value.error_estimate)
        assert excinfo.value.best_estimate > 0

    def test_invalid_bounds(self):
        with pytest.raises(ValueError):
            integrate_1d(lambda t: t, 1.0, 1.0)


class TestRadial:
    def test_gaussian(self):
        assert integrate_radial_3d(lambda r: np.exp(-r * r)) == pytest.approx(
            math.pi ** 1.5, abs=1e-8)

    def test_r2_gaussian(self):
        assert integrate_radial_3d(lambda r: r * r * np.exp(-r * r)) == pytest.approx(
            1.5 * math.pi ** 1.5, abs=1e-8)

    def test_zero(self):
        assert integrate_radial_3d(lambda r: np.zeros_like(r)) == 0.0

    def test_matches_radial_1d_reduction(self):
        g = lambda r: np.exp(-2.0 * r * r) * (1.0 + r)
        via_radial = integrate_radial_3d(g)
        via_1d, _ = integrate_1d(lambda r: 4.0 * math.pi * r * r * g(r),
                                 0.0, math.inf)
        assert via_radial == pytest.approx(via_1d, rel=1e-10)


class TestGaussianMoment:
    def test_zeroth(self):
        assert gaussian_moment(0, 1.0) == pytest.approx(SQRT_PI, rel=1e-15)

    def test_second(self):
        assert gaussian_moment(2, 1.0) == pytest.approx(SQRT_PI / 2.0, rel=1e-15)

    def test_fourth_scaled(self):
        # (3/4) sqrt(pi) 2^(-5/2)
        assert gaussian_moment(4, 2.0) == pytest.approx(
            0.75 * SQRT_PI * 2.0 ** -2.5, rel=1e-15)
        assert gaussian_moment(4, 2.0) == pytest.approx(0.2349964007466544, abs=1e-12)

    def test_odd_order_rejected(self):
        with pytest.raises(ValueError):
            gaussian_moment(3, 1.0)

    def test_bad_rate_rejected(self):
        with pytest.raises(ValueError):
            gaussian_moment(2, 0.0)


class TestChiSquare:
    def test_zero_statistic(self):
        assert chi_square_p_value(0.0, 7) == 1.0

    def test_large_dof_limit(self):
        assert chi_square_p_value(5.0, 10_000) == pytest.approx(1.0, abs=1e-12)

    def test_dof_two_exponential(self):
        # For dof=2 the upper tail is exp(-s/2) exactly.
        assert chi_square_p_value(2.0 * math.log(10.0), 2) == pytest.approx(
            0.1, abs=1e-12)
        assert chi_square_p_value(4.60517, 2) == pytest.approx(0.1, abs=1e-6)

    def test_monotone_decreasing_on_grid(self):
        stats = np.linspace(0.0, 50.0, 100)
        for dof in (1, 2, 5, 20):
            p = [chi_square_p_value(float(s), dof) for s in stats]
            assert all(b <= a + 1e-12 for a, b in zip(p[:-1], p[1:]))

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            chi_square_p_value(-1.0, 2)
        with pytest.raises(ValueError):
            chi_square_p_value(1.0, 0)


class TestGridAndSpec:
    def test_grid_requires_increasing_nodes(self):
        with pytest.raises(ValueError):
            Grid1D(np.array([0.0, 0.0, 1.0]))
        with pytest.raises(ValueError):
            Grid1D(np.array([1.0]))

    def test_uniform_spacing(self):
        g = Grid1D.uniform(0.0, 1.0, 11)
        assert g.spacing == pytest.approx(0.1)
        with pytest.raises(ValueError):
            Grid1D(np.array([0.0, 0.1, 0.5])).spacing  # noqa: B018

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            QuadratureSpec(rel_tol=0.0)
        with pytest.raises(ValueError):
            QuadratureSpec(max_panels=0)

    def test_trapezoid_weights_sum_to_span(self):
        nodes = np.array([0.0, 0.5, 2.0, 3.0])
        assert trapezoid_weights(nodes).sum() == pytest.approx(3.0)
