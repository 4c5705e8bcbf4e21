"""Uniform rectangular grids in 1, 2, or 3 dimensions.

Cell-centered finite volumes: one value per cell, midpoint quadrature for
volume integrals, per-side data for the boundary.  Boundary sides are
ordered (axis0-low, axis0-high, axis1-low, ...); a 1D "face" has unit
area so that |Omega| and the surface measure stay literal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class Grid:
    shape: tuple[int, ...]
    extent: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "shape", tuple(int(n) for n in self.shape))
        object.__setattr__(self, "extent", tuple(float(e) for e in self.extent))
        if not 1 <= len(self.shape) <= 3:
            raise ValueError(f"grid dimension must be 1, 2, or 3, got {len(self.shape)}")
        if len(self.extent) != len(self.shape):
            raise ValueError("extent and shape must have the same length")
        if any(n < 1 for n in self.shape):
            raise ValueError(f"cells per axis must be >= 1, got {self.shape}")
        if any(not (e > 0.0 and math.isfinite(e)) for e in self.extent):
            raise ValueError(f"extent per axis must be finite and > 0, got {self.extent}")

    @property
    def dim(self) -> int:
        return len(self.shape)

    @cached_property
    def spacing(self) -> tuple[float, ...]:
        return tuple(e / n for e, n in zip(self.extent, self.shape))

    @cached_property
    def cell_volume(self) -> float:
        return math.prod(self.spacing)

    @cached_property
    def n_cells(self) -> int:
        return math.prod(self.shape)

    @cached_property
    def volume(self) -> float:
        return self.cell_volume * self.n_cells

    @property
    def n_sides(self) -> int:
        return 2 * self.dim

    def face_area(self, axis: int) -> float:
        """Area of one cell face orthogonal to `axis` (unit area in 1D)."""
        return self.cell_volume / self.spacing[axis]

    def side_area(self, side: int) -> float:
        """Total area of one boundary side (side = 2*axis + (0 low | 1 high))."""
        axis = side // 2
        return self.face_area(axis) * (self.n_cells // self.shape[axis])

    @cached_property
    def surface_area(self) -> float:
        return sum(self.side_area(s) for s in range(self.n_sides))

    @cached_property
    def boundary_cells(self) -> tuple[np.ndarray, ...]:
        """Flat indices of the cells adjacent to each boundary side."""
        idx = np.arange(self.n_cells).reshape(self.shape)
        out = []
        for axis in range(self.dim):
            lo = np.take(idx, 0, axis=axis).ravel()
            hi = np.take(idx, self.shape[axis] - 1, axis=axis).ravel()
            out.extend([lo, hi])
        return tuple(out)

    def cell_centers(self) -> np.ndarray:
        """Cell-center coordinates, shape (n_cells, dim), C order."""
        axes = [
            (np.arange(n) + 0.5) * h
            for n, h in zip(self.shape, self.spacing)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def interior_face_pairs(self, axis: int) -> tuple[np.ndarray, np.ndarray]:
        """Flat indices (low side, high side) of cells sharing an interior
        face orthogonal to `axis`."""
        idx = np.arange(self.n_cells).reshape(self.shape)
        lo = np.take(idx, range(self.shape[axis] - 1), axis=axis).ravel()
        hi = np.take(idx, range(1, self.shape[axis]), axis=axis).ravel()
        return lo, hi

    def grad_sq_integral(self, values: np.ndarray) -> float:
        """Discrete integral of |grad f|^2 from face-centered differences."""
        total = 0.0
        for axis in range(self.dim):
            if self.shape[axis] < 2:
                continue
            lo, hi = self.interior_face_pairs(axis)
            diff = (values[hi] - values[lo]) / self.spacing[axis]
            # each interior face controls a slab of volume area * spacing
            total += float(np.sum(diff ** 2)) * self.face_area(axis) * self.spacing[axis]
        return total


@dataclass(frozen=True)
class Field:
    """One real value per grid cell, immutable once constructed."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float, copy=True).reshape(-1)
        if arr.size != self.grid.n_cells:
            raise ValueError(
                f"field has {arr.size} values for a grid of {self.grid.n_cells} cells")
        if not np.all(np.isfinite(arr)):
            raise ValueError("field values must all be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "Field":
        return cls(grid, np.full(grid.n_cells, float(value)))

    def min(self) -> float:
        return float(self.values.min())

    def max(self) -> float:
        return float(self.values.max())


@dataclass(frozen=True)
class RobinData:
    """Robin heat-exchange data: flux = h * (theta - theta_Gamma) outward.

    h is piecewise constant per boundary side; spatial variation of the
    transfer coefficient is supported at side granularity only.
    """

    h_faces: tuple[float, ...]
    theta_Gamma: float

    def __post_init__(self):
        object.__setattr__(self, "h_faces", tuple(float(h) for h in self.h_faces))
        if any(h < 0.0 or not math.isfinite(h) for h in self.h_faces):
            raise ValueError(f"h must be >= 0 per face, got {self.h_faces!r}")
        if not any(h > 0.0 for h in self.h_faces):
            raise ValueError("h must be positive on at least one face")
        if not (self.theta_Gamma > 0.0 and math.isfinite(self.theta_Gamma)):
            raise ValueError(f"theta_Gamma must be > 0, got {self.theta_Gamma!r}")

    def for_grid(self, grid: Grid) -> "RobinData":
        if len(self.h_faces) == 1:
            return RobinData(self.h_faces * grid.n_sides, self.theta_Gamma)
        if len(self.h_faces) != grid.n_sides:
            raise ValueError(
                f"{len(self.h_faces)} h values for a grid with {grid.n_sides} sides")
        return self


def integrate(f: Field) -> float:
    """Midpoint-rule volume integral: sum of values times cell volume."""
    return float(f.values.sum()) * f.grid.cell_volume


def boundary_integrate(g, grid: Grid) -> float:
    """Surface integral of per-side values: sum of g * side area.

    `g` is a scalar (applied to every side) or a sequence with one value
    per boundary side in (axis0-low, axis0-high, ...) order.
    """
    if np.isscalar(g):
        return float(g) * grid.surface_area
    g = tuple(float(v) for v in g)
    if len(g) != grid.n_sides:
        raise ValueError(f"{len(g)} side values for a grid with {grid.n_sides} sides")
    return sum(v * grid.side_area(s) for s, v in enumerate(g))


def boundary_heat_flux(grid: Grid, robin: RobinData, theta: np.ndarray) -> float:
    """Total Robin influx integral of h * (theta_Gamma - theta) over the
    boundary, W, evaluated with the adjacent-cell temperatures."""
    robin = robin.for_grid(grid)
    total = 0.0
    for side, h in enumerate(robin.h_faces):
        if h == 0.0:
            continue
        cells = grid.boundary_cells[side]
        area = grid.face_area(side // 2)
        total += h * area * float(np.sum(robin.theta_Gamma - theta[cells]))
    return total


def boundary_entropy_flux(grid: Grid, robin: RobinData, theta: np.ndarray) -> float:
    """Boundary integral of h * (theta_Gamma - theta) / theta, W/K."""
    robin = robin.for_grid(grid)
    total = 0.0
    for side, h in enumerate(robin.h_faces):
        if h == 0.0:
            continue
        cells = grid.boundary_cells[side]
        area = grid.face_area(side // 2)
        total += h * area * float(np.sum((robin.theta_Gamma - theta[cells]) / theta[cells]))
    return total


def boundary_quadratic_flux(grid: Grid, robin: RobinData, theta: np.ndarray) -> float:
    """Boundary integral of h * (theta - theta_Gamma)^2 / theta, W."""
    robin = robin.for_grid(grid)
    total = 0.0
    for side, h in enumerate(robin.h_faces):
        if h == 0.0:
            continue
        cells = grid.boundary_cells[side]
        area = grid.face_area(side // 2)
        total += h * area * float(
            np.sum((theta[cells] - robin.theta_Gamma) ** 2 / theta[cells]))
    return total
