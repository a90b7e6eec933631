import math

import numpy as np
import pytest

from essmodes.diffraction import (NormalStateField, SlitGeometry,
                                  SourceSpectrum, field_from_files,
                                  field_to_files, first_null_position,
                                  synthesize_field, total_action)
from essmodes.numerics import Grid1D

WAVELENGTH = 2.0 * math.pi


class TestTypes:
    def test_slit_order_enforced(self):
        with pytest.raises(ValueError):
            SlitGeometry(slit_separation=1.0, slit_width=2.0,
                         screen_distance=10.0, screen_halfwidth=1.0)

    def test_resolution_floor(self):
        with pytest.raises(ValueError):
            SlitGeometry(slit_separation=2.0, slit_width=1.0,
                         screen_distance=100.0, screen_halfwidth=1.0,
                         screen_points=8)

    def test_paraxial_warning(self):
        with pytest.warns(UserWarning, match="paraxial"):
            SlitGeometry(slit_separation=2.0, slit_width=1.0,
                         screen_distance=10.0, screen_halfwidth=5.0)

    def test_spectrum_positive_frequency_guard(self):
        with pytest.raises(ValueError):
            SourceSpectrum(omega_center=1.0, omega_width=0.3)

    def test_field_shape_checked(self):
        with pytest.raises(ValueError):
            NormalStateField(
                x=np.array([0.0, 1.0]), omega=np.array([1.0, 2.0]),
                amplitude=np.zeros((3, 2), dtype=complex),
                geometry=SlitGeometry(2.0, 1.0, 100.0, 1.0),
                spectrum=SourceSpectrum(1.0, 0.05))


class TestPattern:
    def test_center_is_maximal_for_each_frequency(self, default_field):
        intensity = default_field.intensity()
        i_center = np.argmin(np.abs(default_field.x))
        assert np.all(intensity[i_center, :] >= intensity.max(axis=0) - 1e-15)

    def test_marginal_central_maximum(self, default_field):
        marginal = default_field.intensity().sum(axis=1)
        assert np.argmax(marginal) == np.argmin(np.abs(default_field.x))

    def test_even_in_screen_coordinate(self, default_field):
        amp = default_field.amplitude
        assert np.allclose(amp, amp[::-1, :], atol=1e-15)

    def test_null_positions_match_formula(self, default_geometry, default_field):
        # Monochromatic slice at the band center: nulls within one grid cell.
        iw = np.argmin(np.abs(default_field.omega - 1.0))
        slice_i = default_field.intensity()[:, iw]
        cell = default_field.x[1] - default_field.x[0]
        for order in (0, 1, 2):
            x_null = first_null_position(default_geometry, 1.0, order=order)
            mask = np.abs(default_field.x - x_null) <= cell
            assert slice_i[mask].min() <= 1e-3 * slice_i.max()
            interior = np.abs(default_field.x - x_null) <= 5 * cell
            assert slice_i[mask].min() == slice_i[interior].min()

    def test_first_null_formula(self, default_geometry):
        expected = (math.pi * default_geometry.screen_distance
                    / default_geometry.slit_separation)
        assert first_null_position(default_geometry, 1.0) == pytest.approx(expected)


class TestTotalAction:
    def test_zero_field(self, default_geometry, default_spectrum):
        f = synthesize_field(default_geometry, default_spectrum, amplitude=0.0)
        assert total_action(f) == 0.0

    def test_quadratic_in_amplitude(self, default_geometry, default_spectrum):
        f1 = synthesize_field(default_geometry, default_spectrum, amplitude=1.0)
        f2 = synthesize_field(default_geometry, default_spectrum, amplitude=2.0)
        assert total_action(f2) == pytest.approx(4.0 * total_action(f1), rel=1e-12)

    def test_grid_refinement_convergence(self, default_geometry, default_spectrum):
        base = total_action(synthesize_field(default_geometry, default_spectrum))
        fine = total_action(synthesize_field(
            default_geometry, default_spectrum,
            x_grid=Grid1D.uniform(-1000.0, 1000.0, 2049),
            omega_grid=Grid1D.uniform(0.9, 1.1, 257)))
        assert abs(fine - base) / base < 1e-4

    def test_reference_config_golden_value(self):
        # Reference layout: separation 5 wavelengths, width 1, distance 1000,
        # 2% relative bandwidth, unit amplitude.  The golden number was fixed
        # from two independent resolutions agreeing to 4.3e-8 relative.
        golden = 54.963810482330096
        geometry = SlitGeometry(
            slit_separation=5 * WAVELENGTH, slit_width=WAVELENGTH,
            screen_distance=1000 * WAVELENGTH, screen_halfwidth=1200.0,
            screen_points=2561)
        spectrum = SourceSpectrum(omega_center=1.0, omega_width=0.02)
        coarse = total_action(synthesize_field(
            geometry, spectrum,
            omega_grid=Grid1D.uniform(0.9, 1.1, 321)))
        fine = total_action(synthesize_field(
            geometry, spectrum,
            x_grid=Grid1D.uniform(-1200.0, 1200.0, 5121),
            omega_grid=Grid1D.uniform(0.9, 1.1, 641)))
        assert abs(coarse - fine) / fine < 1e-6
        assert coarse == pytest.approx(golden, rel=1e-6)
        assert fine == pytest.approx(golden, rel=1e-7)


class TestPersistence:
    def test_round_trip_is_lossless(self, tmp_path, default_geometry, default_spectrum):
        field = synthesize_field(
            default_geometry, default_spectrum,
            x_grid=Grid1D.uniform(-50.0, 50.0, 17),
            omega_grid=Grid1D.uniform(0.95, 1.05, 9),
            amplitude=1.7)
        jp, cp = tmp_path / "field.json", tmp_path / "field.csv"
        field_to_files(field, jp, cp)
        back = field_from_files(jp, cp)
        assert np.array_equal(back.x, field.x)
        assert np.array_equal(back.omega, field.omega)
        assert np.array_equal(back.amplitude, field.amplitude)
        assert back.geometry == field.geometry
        assert back.spectrum == field.spectrum
        assert back.amplitude_scale == field.amplitude_scale

    def test_csv_columns(self, tmp_path, default_geometry, default_spectrum):
        field = synthesize_field(
            default_geometry, default_spectrum,
            x_grid=Grid1D.uniform(-1.0, 1.0, 2),
            omega_grid=Grid1D.uniform(0.99, 1.01, 2))
        jp, cp = tmp_path / "f.json", tmp_path / "f.csv"
        field_to_files(field, jp, cp)
        lines = cp.read_text().splitlines()
        assert lines[0] == "x,omega,re,im"
        assert len(lines) == 1 + 4
