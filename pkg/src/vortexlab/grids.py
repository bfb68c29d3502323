"""Grid and field value types plus the discrete calculus shared by every solver.

Cartesian fields live on uniform cell-centered grids over the box [-L, L]^n
(n = 1 or 2) and are treated as identically zero outside it.  Radial data live
on grids that are uniform in the transformed variable sigma = r^n / n, which is
the variable in which the radial mass function obeys a standard conservation
law.  All value types are immutable after construction; the operations here are
pure functions.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property
from math import gamma, pi

import numpy as np

__all__ = [
    "CartesianGrid",
    "DensityField",
    "VectorField",
    "RadialGrid",
    "RadialProfile",
    "MassFunction",
    "unit_ball_volume",
    "sphere_area",
    "total_mass",
    "lp_norm",
    "second_moment",
    "radial_average",
    "field_from_function",
    "reconstruct_from_profile",
    "write_grid_array",
    "read_grid_array",
    "write_grid_csv",
]


def unit_ball_volume(n: int) -> float:
    """Volume omega_n of the unit ball in R^n."""
    return pi ** (n / 2.0) / gamma(n / 2.0 + 1.0)


def sphere_area(n: int) -> float:
    """Surface measure |S^{n-1}| of the unit sphere in R^n (2 for n=1)."""
    return n * unit_ball_volume(n)


@dataclass(frozen=True)
class CartesianGrid:
    """Uniform cell-centered grid on the box [-half_width, half_width]^n.

    Cells per axis must be even and at least 8 so the box center sits on a
    cell face and coarse quadrature stays meaningful.
    """

    n: int
    half_width: float
    cells: int

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError(f"Cartesian fields support n in {{1, 2}}, got n={self.n}")
        if self.cells < 8 or self.cells % 2 != 0:
            raise ValueError(f"cells must be even and >= 8, got {self.cells}")
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")

    @property
    def h(self) -> float:
        return 2.0 * self.half_width / self.cells

    @property
    def shape(self) -> tuple:
        return (self.cells,) * self.n

    @property
    def cell_volume(self) -> float:
        return self.h**self.n

    def axis_centers(self) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        return -self.half_width + (np.arange(self.cells) + 0.5) * self.h

    def centers(self) -> tuple:
        """Tuple of cell-center coordinate arrays, one per axis, "ij" indexed."""
        x = self.axis_centers()
        if self.n == 1:
            return (x,)
        return tuple(np.meshgrid(x, x, indexing="ij"))

    def radius(self, center=None) -> np.ndarray:
        """Distance of each cell center from `center` (default: origin)."""
        center = np.zeros(self.n) if center is None else np.asarray(center, dtype=float)
        coords = self.centers()
        r2 = np.zeros(self.shape)
        for k in range(self.n):
            r2 += (coords[k] - center[k]) ** 2
        return np.sqrt(r2)

    def inradius(self, center=None) -> float:
        """Distance from `center` to the nearest box face."""
        center = np.zeros(self.n) if center is None else np.asarray(center, dtype=float)
        return float(self.half_width - np.max(np.abs(center)))


def _frozen_array(values, shape) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != tuple(shape):
        raise ValueError(f"values have shape {arr.shape}, expected {tuple(shape)}")
    if not np.isfinite(arr).all():
        raise ValueError("values contain non-finite entries")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class DensityField:
    """Nonnegative cell-averaged density on a Cartesian grid (mass/volume)."""

    grid: CartesianGrid
    values: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.values, self.grid.shape)
        if arr.min() < 0.0:
            raise ValueError(f"density values must be nonnegative (min {arr.min():.3e})")
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True, eq=False)
class VectorField:
    """Per-axis velocity component arrays sharing one grid."""

    grid: CartesianGrid
    components: tuple

    def __post_init__(self):
        comps = tuple(_frozen_array(c, self.grid.shape) for c in self.components)
        if len(comps) != self.grid.n:
            raise ValueError(f"expected {self.grid.n} components, got {len(comps)}")
        object.__setattr__(self, "components", comps)

    def magnitude(self) -> np.ndarray:
        out = np.zeros(self.grid.shape)
        for c in self.components:
            out += c * c
        return np.sqrt(out)


@dataclass(frozen=True)
class RadialGrid:
    """Radial grid with nodes uniform in sigma = r^n / n, starting at sigma = 0."""

    n: int
    r_max: float
    nodes: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be >= 1")
        if self.nodes < 16:
            raise ValueError(f"need at least 16 nodes, got {self.nodes}")
        if not self.r_max > 0:
            raise ValueError("r_max must be positive")

    @cached_property
    def sigma(self) -> np.ndarray:
        s = np.linspace(0.0, self.r_max**self.n / self.n, self.nodes)
        s.flags.writeable = False
        return s

    @cached_property
    def r(self) -> np.ndarray:
        r = (self.n * self.sigma) ** (1.0 / self.n)
        r.flags.writeable = False
        return r

    @property
    def d_sigma(self) -> float:
        return float(self.sigma[1] - self.sigma[0])


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Nonnegative radial density u(r_j) on a RadialGrid."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.values, (self.grid.nodes,))
        if arr.min() < 0.0:
            raise ValueError(f"radial density must be nonnegative (min {arr.min():.3e})")
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True, eq=False)
class MassFunction:
    """Cumulative radial mass M(sigma_j) = int_0^r s^{n-1} u ds, per unit sphere measure.

    Multiply by sphere_area(n) to convert to full mass.  Must start at 0 and be
    nondecreasing; the final node value is the total (it is also the supremum).
    """

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.values, (self.grid.nodes,))
        scale = 1.0 + abs(float(arr[-1]))
        if abs(arr[0]) > 1e-12 * scale:
            raise ValueError(f"M(0) must vanish, got {arr[0]:.3e}")
        if np.min(np.diff(arr)) < -1e-12 * scale:
            raise ValueError("mass function must be nondecreasing")
        object.__setattr__(self, "values", arr)

    @property
    def total(self) -> float:
        """Total mass per unit sphere measure."""
        return float(self.values[-1])

    def full_mass(self) -> float:
        return sphere_area(self.grid.n) * self.total


# ---------------------------------------------------------------------------
# quadrature-style reductions


def total_mass(field: DensityField) -> float:
    """h^n * sum of cell values."""
    return field.grid.cell_volume * float(field.values.sum())


def lp_norm(field: DensityField, p) -> float:
    """Discrete L^p norm with cell-volume weights; p = inf gives the max cell value."""
    if p == np.inf:
        return float(field.values.max()) if field.values.size else 0.0
    p = float(p)
    if p < 1.0:
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    return float((field.grid.cell_volume * (field.values**p).sum()) ** (1.0 / p))


def second_moment(field: DensityField, center=None) -> float:
    """h^n * sum of u_i |x_i - center|^2."""
    r = field.grid.radius(center)
    return field.grid.cell_volume * float((field.values * r * r).sum())


def field_from_function(grid: CartesianGrid, fn) -> DensityField:
    """Sample fn(points) at cell centers; points arrive with shape (..., n)."""
    pts = np.stack(grid.centers(), axis=-1)
    return DensityField(grid, np.asarray(fn(pts), dtype=float))


def radial_average(field: DensityField, rgrid: RadialGrid, center=None) -> RadialProfile:
    """Bin-average a (approximately radial) field onto a radial grid.

    Cells are assigned to the radial node whose half-open annulus [midpoint to
    previous node, midpoint to next node) contains their center radius; each
    node value is the plain average of its cells (cells have equal volume, so
    this is the volume-weighted mean and preserves mass to O(h)).  Empty bins
    are filled by linear interpolation from their populated neighbors.
    """
    if rgrid.r_max > field.grid.inradius(center):
        raise ValueError(
            f"radial grid reaches r={rgrid.r_max} beyond the box inradius "
            f"{field.grid.inradius(center):.6g}"
        )
    r_cells = field.grid.radius(center).ravel()
    vals = field.values.ravel()
    nodes_r = rgrid.r
    edges = np.concatenate([[0.0], 0.5 * (nodes_r[1:] + nodes_r[:-1]), [nodes_r[-1]]])
    idx = np.clip(np.searchsorted(edges, r_cells, side="right") - 1, 0, rgrid.nodes - 1)
    inside = r_cells <= nodes_r[-1]
    sums = np.bincount(idx[inside], weights=vals[inside], minlength=rgrid.nodes)
    counts = np.bincount(idx[inside], minlength=rgrid.nodes)
    out = np.zeros(rgrid.nodes)
    filled = counts > 0
    out[filled] = sums[filled] / counts[filled]
    if not filled.all():
        if not filled.any():
            raise ValueError("no grid cells fall inside the radial grid")
        out[~filled] = np.interp(nodes_r[~filled], nodes_r[filled], out[filled])
    return RadialProfile(rgrid, np.maximum(out, 0.0))


def reconstruct_from_profile(grid: CartesianGrid, profile: RadialProfile, center=None) -> DensityField:
    """Evaluate a radial profile back onto a Cartesian grid (linear in r, 0 beyond r_max)."""
    r = grid.radius(center)
    vals = np.interp(r, profile.grid.r, profile.values, right=0.0)
    return DensityField(grid, np.maximum(vals, 0.0))


# ---------------------------------------------------------------------------
# serialization

_HEADER = struct.Struct("<qqd")  # n, cells, half_width


def write_grid_array(grid: CartesianGrid, values: np.ndarray, path) -> None:
    """Flat binary layout: int64 n, int64 cells, float64 half_width, then row-major float64 values."""
    arr = np.ascontiguousarray(values, dtype="<f8")
    if arr.shape != grid.shape:
        raise ValueError("array shape does not match grid")
    with open(path, "wb") as f:
        f.write(_HEADER.pack(grid.n, grid.cells, grid.half_width))
        f.write(arr.tobytes())


def read_grid_array(path):
    """Inverse of write_grid_array; returns (grid, values)."""
    with open(path, "rb") as f:
        n, cells, half_width = _HEADER.unpack(f.read(_HEADER.size))
        grid = CartesianGrid(int(n), float(half_width), int(cells))
        data = np.frombuffer(f.read(), dtype="<f8").reshape(grid.shape)
    return grid, data.copy()


def write_grid_csv(grid: CartesianGrid, columns: dict, path) -> None:
    """CSV with cell-center coordinate columns followed by one column per named array.

    Row order is row-major over the grid.  Floats are written with repr-stable
    precision so identical data produces byte-identical files.
    """
    coords = grid.centers()
    names = ["x"] if grid.n == 1 else ["x", "y"]
    header = names + list(columns.keys())
    cols = [c.ravel() for c in coords] + [np.asarray(v).ravel() for v in columns.values()]
    with open(path, "w", newline="") as f:
        f.write(",".join(header) + "\n")
        for row in zip(*cols):
            f.write(",".join(f"{v:.17g}" for v in row) + "\n")
