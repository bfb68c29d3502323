import numpy as np
import pytest
from math import pi, sqrt

from vortexlab.grids import (
    CartesianGrid,
    DensityField,
    MassFunction,
    RadialGrid,
    VectorField,
    field_from_function,
    lp_norm,
    radial_average,
    read_grid_array,
    reconstruct_from_profile,
    second_moment,
    sphere_area,
    total_mass,
    unit_ball_volume,
    write_grid_array,
    write_grid_csv,
)


def disk_field(N=256, L=2.0, R=1.0, height=1.0):
    g = CartesianGrid(2, L, N)
    return DensityField(g, height * (g.radius() <= R).astype(float))


class TestGridValidation:
    def test_dimension_restricted(self):
        with pytest.raises(ValueError):
            CartesianGrid(3, 1.0, 16)

    def test_cells_even_and_minimum(self):
        with pytest.raises(ValueError):
            CartesianGrid(2, 1.0, 15)
        with pytest.raises(ValueError):
            CartesianGrid(2, 1.0, 6)

    def test_cell_size(self):
        g = CartesianGrid(2, 4.0, 256)
        assert g.h == pytest.approx(8.0 / 256)
        assert g.cell_volume == pytest.approx(g.h**2)

    def test_density_must_be_nonnegative(self):
        g = CartesianGrid(1, 1.0, 16)
        with pytest.raises(ValueError):
            DensityField(g, -np.ones(16))

    def test_values_are_frozen(self):
        g = CartesianGrid(1, 1.0, 16)
        u = DensityField(g, np.ones(16))
        with pytest.raises(ValueError):
            u.values[0] = 2.0

    def test_vector_field_component_count(self):
        g = CartesianGrid(2, 1.0, 16)
        with pytest.raises(ValueError):
            VectorField(g, (np.zeros((16, 16)),))

    def test_radial_grid_nodes(self):
        rg = RadialGrid(2, 3.0, 64)
        assert rg.sigma[0] == 0.0
        assert np.all(np.diff(rg.sigma) > 0)
        np.testing.assert_allclose(rg.r, np.sqrt(2 * rg.sigma))
        with pytest.raises(ValueError):
            RadialGrid(2, 3.0, 8)

    def test_mass_function_invariants(self):
        rg = RadialGrid(2, 3.0, 32)
        with pytest.raises(ValueError):
            MassFunction(rg, np.linspace(1.0, 0.0, 32))
        with pytest.raises(ValueError):
            MassFunction(rg, np.full(32, 0.5))


class TestReductions:
    def test_zero_field(self):
        g = CartesianGrid(2, 1.0, 32)
        z = DensityField(g, np.zeros(g.shape))
        assert total_mass(z) == 0.0
        assert lp_norm(z, 2) == 0.0
        assert lp_norm(z, np.inf) == 0.0
        assert second_moment(z) == 0.0

    def test_disk_mass_is_area(self):
        u = disk_field(N=256)
        assert total_mass(u) == pytest.approx(pi, abs=4 * u.grid.h)

    def test_disk_norms(self):
        u = disk_field(N=256)
        assert lp_norm(u, np.inf) == 1.0
        assert lp_norm(u, 2) == pytest.approx(sqrt(pi), abs=4 * u.grid.h)

    def test_lp_rejects_small_p(self):
        u = disk_field(N=64)
        with pytest.raises(ValueError):
            lp_norm(u, 0.5)

    def test_disk_second_moment(self):
        # int_0^R r^2 2 pi r dr = pi R^4 / 2
        u = disk_field(N=256, R=1.0)
        assert second_moment(u) == pytest.approx(pi / 2, rel=0.02)

    def test_parallel_axis_identity(self):
        u = disk_field(N=128)
        d = np.array([0.25, -0.5])
        shifted = second_moment(u, center=-d)
        assert shifted == pytest.approx(second_moment(u) + total_mass(u) * d @ d, rel=1e-12)

    def test_homogeneity_degree_one(self):
        rng = np.random.default_rng(7)
        g = CartesianGrid(2, 1.0, 32)
        vals = rng.random(g.shape)
        u = DensityField(g, vals)
        lam = 3.7
        ul = DensityField(g, lam * vals)
        assert total_mass(ul) == pytest.approx(lam * total_mass(u), rel=1e-12)
        assert second_moment(ul) == pytest.approx(lam * second_moment(u), rel=1e-12)
        for p in (1, 2, 5, np.inf):
            assert lp_norm(ul, p) == pytest.approx(lam * lp_norm(u, p), rel=1e-12)

    def test_disk_mass_first_order_convergence(self):
        errs, hs = [], []
        for N in (64, 128, 256):
            u = disk_field(N=N)
            errs.append(abs(total_mass(u) - pi))
            hs.append(u.grid.h)
        slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
        assert 0.8 <= slope <= 1.2


class TestRadialAverage:
    def test_constant_field(self):
        g = CartesianGrid(2, 2.0, 128)
        u = DensityField(g, np.full(g.shape, 3.0))
        prof = radial_average(u, RadialGrid(2, 1.8, 32))
        np.testing.assert_allclose(prof.values, 3.0, rtol=1e-12)

    def test_patch_field(self):
        u = disk_field(N=256, R=1.0, height=2.0)
        prof = radial_average(u, RadialGrid(2, 1.8, 64))
        h = u.grid.h
        inside = prof.grid.r < 1.0 - 2 * h
        outside = prof.grid.r > 1.0 + 2 * h
        np.testing.assert_allclose(prof.values[inside], 2.0, rtol=1e-12)
        np.testing.assert_allclose(prof.values[outside], 0.0, atol=1e-12)

    def test_mass_preserved(self):
        g = CartesianGrid(2, 2.0, 256)
        u = DensityField(g, np.exp(-g.radius() ** 2 * 4))
        rg = RadialGrid(2, 1.9, 96)
        prof = radial_average(u, rg)
        prof_mass = sphere_area(2) * np.trapezoid(prof.values, rg.sigma)
        assert prof_mass == pytest.approx(total_mass(u), rel=2 * g.h)

    def test_round_trip_l1(self):
        g = CartesianGrid(2, 2.0, 256)
        u = DensityField(g, np.exp(-g.radius() ** 2 * 2))
        prof = radial_average(u, RadialGrid(2, 1.9, 128))
        back = reconstruct_from_profile(g, prof)
        err = total_mass(DensityField(g, np.abs(back.values - u.values)))
        assert err <= 5 * g.h * total_mass(u)

    def test_rejects_radial_grid_beyond_box(self):
        u = disk_field(N=64, L=2.0)
        with pytest.raises(ValueError):
            radial_average(u, RadialGrid(2, 2.5, 32))


class TestGeometryConstants:
    def test_ball_volumes(self):
        assert unit_ball_volume(1) == pytest.approx(2.0)
        assert unit_ball_volume(2) == pytest.approx(pi)
        assert unit_ball_volume(3) == pytest.approx(4 * pi / 3)
        assert sphere_area(2) == pytest.approx(2 * pi)


class TestSerialization:
    def test_binary_round_trip(self, tmp_path):
        g = CartesianGrid(2, 1.5, 32)
        rng = np.random.default_rng(0)
        vals = rng.random(g.shape)
        path = tmp_path / "field.bin"
        write_grid_array(g, vals, path)
        g2, vals2 = read_grid_array(path)
        assert g2 == g
        np.testing.assert_array_equal(vals2, vals)

    def test_binary_header_layout(self, tmp_path):
        g = CartesianGrid(1, 2.0, 16)
        path = tmp_path / "field.bin"
        write_grid_array(g, np.arange(16.0), path)
        raw = path.read_bytes()
        assert len(raw) == 24 + 16 * 8
        assert int.from_bytes(raw[0:8], "little") == 1
        assert int.from_bytes(raw[8:16], "little") == 16

    def test_csv_columns(self, tmp_path):
        g = CartesianGrid(2, 1.0, 8)
        path = tmp_path / "field.csv"
        write_grid_csv(g, {"u": np.ones(g.shape)}, path)
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "x,y,u"
        assert len(lines) == 1 + 64

    def test_field_from_function(self):
        g = CartesianGrid(2, 1.0, 32)
        u = field_from_function(g, lambda p: np.exp(-(p**2).sum(axis=-1)))
        assert u.values.shape == g.shape
        assert u.values.max() <= 1.0


class TestSignedArraySerialization:
    def test_velocity_component_round_trip(self, tmp_path):
        # the binary format carries signed values (velocity components), not
        # just densities
        g = CartesianGrid(2, 1.0, 16)
        rng = np.random.default_rng(9)
        vals = rng.standard_normal(g.shape)
        path = tmp_path / "vx.bin"
        write_grid_array(g, vals, path)
        g2, back = read_grid_array(path)
        assert g2 == g
        np.testing.assert_array_equal(back, vals)

    def test_multi_column_csv(self, tmp_path):
        g = CartesianGrid(1, 1.0, 8)
        path = tmp_path / "vel.csv"
        write_grid_csv(g, {"vx": np.arange(8.0), "u": np.ones(8)}, path)
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "x,vx,u"
        assert len(lines) == 9
