import numpy as np
import pytest

from emhd.grid import (
    Grid,
    SpectralField,
    abc_field,
    constant_field,
    dilate,
    from_physical,
    resample,
    single_mode_field,
    zero_field,
)
from emhd.grid import ShapeError


class TestGrid:
    def test_power_of_two_required(self):
        for bad in (0, 4, 12, 33, 7):
            with pytest.raises(ValueError):
                Grid(bad)
        for ok in (8, 16, 32, 64, 128):
            Grid(ok)

    def test_dealias_cutoff(self):
        assert Grid(32).dealias_cutoff == 10
        assert Grid(64).dealias_cutoff == 21

    def test_wavenumber_range(self):
        k = Grid(16).wavenumbers
        assert k.min() == -8 and k.max() == 7
        assert set(np.abs(k)) == set(range(9))


class TestSpectralField:
    def test_roundtrip(self, grid32):
        rng = np.random.default_rng(1)
        vals = rng.standard_normal((3, 32, 32, 32))
        f = from_physical(grid32, vals)
        back = from_physical(grid32, f.to_physical())
        rel = np.max(np.abs(back.coeffs - f.coeffs)) / np.max(np.abs(f.coeffs))
        assert rel <= 1e-13

    def test_hermitian_symmetry_of_real_fields(self, grid32):
        rng = np.random.default_rng(2)
        f = from_physical(grid32, rng.standard_normal((3, 32, 32, 32)))
        assert f.hermitian_defect() <= 1e-13 * f.max_abs_coeff()

    def test_shape_validation(self, grid16):
        with pytest.raises(ShapeError):
            SpectralField(grid16, np.zeros((2, 16, 16, 16), dtype=complex))
        with pytest.raises(ShapeError):
            SpectralField(grid16, np.zeros((3, 8, 16, 16), dtype=complex))

    def test_dealias_zeroes_high_modes(self, grid16):
        f = zero_field(grid16, 1)
        f.coeffs[0, 6, 0, 0] = 1.0  # |k| = 6 > 16 // 3
        g = f.dealias()
        assert np.all(g.coeffs == 0)

    def test_constant_field(self, grid16):
        f = constant_field(grid16, [1.0, 1.0, 1.0])
        vals = f.to_physical()
        assert np.allclose(vals, 1.0, atol=1e-14)


class TestAnalyticFields:
    def test_abc_values(self, grid32):
        x1, x2, x3 = grid32.meshgrid()
        expect = np.stack(
            [
                np.sin(x3) + np.cos(x2),
                np.sin(x1) + np.cos(x3),
                np.sin(x2) + np.cos(x1),
            ]
        )
        assert np.max(np.abs(abc_field(grid32).to_physical() - expect)) < 1e-13

    def test_single_mode_values(self, grid32):
        x1, _, _ = grid32.meshgrid()
        f = single_mode_field(grid32, 4)
        expect = np.zeros((3, 32, 32, 32))
        expect[1] = np.cos(4 * x1)
        assert np.max(np.abs(f.to_physical() - expect)) < 1e-14
        assert f.divergence_defect() == 0.0

    def test_single_mode_rejects_compressive_axis(self, grid32):
        with pytest.raises(ValueError):
            single_mode_field(grid32, 4, component=0, axis=0)


class TestResampleDilate:
    def test_resample_preserves_modes(self, grid16):
        f = single_mode_field(grid16, 3)
        up = resample(f, 32)
        x1, _, _ = up.grid.meshgrid()
        assert np.max(np.abs(up.to_physical()[1] - np.cos(3 * x1))) < 1e-13

    def test_dilate_doubles_wavenumber(self, grid32):
        f = single_mode_field(grid32, 4)
        g = dilate(f, 2)
        x1, _, _ = grid32.meshgrid()
        assert np.max(np.abs(g.to_physical()[1] - np.cos(8 * x1))) < 1e-13

    def test_dilate_identity(self, grid32):
        f = single_mode_field(grid32, 4)
        assert np.all(dilate(f, 1).coeffs == f.coeffs)

    def test_dilate_guards_cutoff(self, grid32):
        f = single_mode_field(grid32, 8)
        with pytest.raises(ValueError):
            dilate(f, 2)  # 16 > 10
