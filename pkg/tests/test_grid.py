"""Grid bookkeeping, quadrature, and boundary measures."""

import numpy as np
import pytest

from coldpress.grid import Field, Grid, RobinData, boundary_integrate, integrate


class TestGrid:
    def test_cell_volume_and_total_volume(self):
        g = Grid(shape=(4, 5), extent=(2.0, 1.0))
        assert g.cell_volume == pytest.approx(0.5 * 0.2)
        assert g.volume == pytest.approx(2.0)

    def test_boundary_sides_partition(self):
        g = Grid(shape=(3, 4, 5), extent=(1.0, 1.0, 1.0))
        counted = sum(len(g.boundary_cells[s]) for s in range(g.n_sides))
        # every side lists the adjacent cell layer once
        assert counted == 2 * (4 * 5 + 3 * 5 + 3 * 4)
        assert g.surface_area == pytest.approx(6.0)

    def test_unit_interval_faces(self):
        g = Grid(shape=(10,), extent=(1.0,))
        assert g.face_area(0) == 1.0
        assert g.surface_area == 2.0

    def test_interior_neighbor_count(self):
        g = Grid(shape=(3, 3), extent=(1.0, 1.0))
        pairs = sum(len(g.interior_face_pairs(a)[0]) for a in range(g.dim))
        assert pairs == 2 * 3 + 2 * 3

    @pytest.mark.parametrize("shape", [(5,), (4, 3), (3, 4, 5)])
    def test_interior_cells_have_two_neighbors_per_axis(self, shape):
        g = Grid(shape=shape, extent=(1.0,) * len(shape))
        degree = np.zeros(g.n_cells, dtype=int)
        for axis in range(g.dim):
            lo, hi = g.interior_face_pairs(axis)
            np.add.at(degree, lo, 1)
            np.add.at(degree, hi, 1)
        interior = np.ones(g.shape, dtype=bool)
        for axis in range(g.dim):
            interior = interior & (np.arange(g.shape[axis]) > 0).reshape(
                [-1 if a == axis else 1 for a in range(g.dim)])
            interior = interior & (np.arange(g.shape[axis])
                                   < g.shape[axis] - 1).reshape(
                [-1 if a == axis else 1 for a in range(g.dim)])
        assert np.all(degree.reshape(g.shape)[interior] == 2 * g.dim)

    def test_invalid_grids_rejected(self):
        with pytest.raises(ValueError):
            Grid(shape=(0,), extent=(1.0,))
        with pytest.raises(ValueError):
            Grid(shape=(4, 4), extent=(1.0,))
        with pytest.raises(ValueError):
            Grid(shape=(2, 2, 2, 2), extent=(1.0,) * 4)


class TestField:
    def test_rejects_bad_sizes_and_values(self):
        g = Grid(shape=(4,), extent=(1.0,))
        with pytest.raises(ValueError):
            Field(g, np.ones(5))
        with pytest.raises(ValueError):
            Field(g, [1.0, np.nan, 0.0, 0.0])

    def test_immutable(self):
        g = Grid(shape=(4,), extent=(1.0,))
        f = Field(g, np.ones(4))
        with pytest.raises(ValueError):
            f.values[0] = 2.0


class TestIntegrate:
    def test_constant_field(self):
        g = Grid(shape=(8,), extent=(2.0,))
        assert integrate(Field.constant(g, 1.0)) == pytest.approx(2.0)

    def test_linear_exact_midpoint(self):
        g = Grid(shape=(100,), extent=(1.0,))
        x = g.cell_centers()[:, 0]
        assert integrate(Field(g, x)) == pytest.approx(0.5, abs=1e-4)

    def test_linearity(self):
        g = Grid(shape=(6, 7), extent=(1.0, 3.0))
        rng = np.random.default_rng(0)
        f = rng.normal(size=g.n_cells)
        h = rng.normal(size=g.n_cells)
        lhs = integrate(Field(g, 2.0 * f + 3.0 * h))
        rhs = 2.0 * integrate(Field(g, f)) + 3.0 * integrate(Field(g, h))
        assert lhs == pytest.approx(rhs, rel=1e-13, abs=1e-13)


class TestBoundaryIntegrate:
    def test_unit_cube_surface(self):
        g = Grid(shape=(3, 3, 3), extent=(1.0, 1.0, 1.0))
        assert boundary_integrate(1.0, g) == pytest.approx(6.0)

    def test_interval_endpoints(self):
        g = Grid(shape=(16,), extent=(1.0,))
        assert boundary_integrate(1.0, g) == pytest.approx(2.0)

    def test_constant_scales_with_area(self):
        g = Grid(shape=(4, 8), extent=(2.0, 1.0))
        c = 3.5
        assert boundary_integrate(c, g) == pytest.approx(c * g.surface_area)
        per_side = (c,) * g.n_sides
        assert boundary_integrate(per_side, g) == pytest.approx(c * g.surface_area)


class TestRobinData:
    def test_validation(self):
        with pytest.raises(ValueError):
            RobinData(h_faces=(0.0, 0.0), theta_Gamma=1.0)
        with pytest.raises(ValueError):
            RobinData(h_faces=(-1.0, 1.0), theta_Gamma=1.0)
        with pytest.raises(ValueError):
            RobinData(h_faces=(1.0,), theta_Gamma=-3.0)

    def test_scalar_broadcast(self):
        g = Grid(shape=(2, 2), extent=(1.0, 1.0))
        r = RobinData(h_faces=(2.0,), theta_Gamma=1.0).for_grid(g)
        assert r.h_faces == (2.0,) * 4
