"""Nonlocal operators: transport velocity v = -grad (-Lap)^{-s} u, scalar
potentials, energies, and the fractional bilinear form.

All Cartesian convolutions are free-space: fields are compactly supported in
the box, the kernel is tabulated on the doubled grid, and the product is taken
with zero padding (no periodic images).  The velocity kernel

    K(z) = C(n,s) * z / |z|^{n+2-2s},   C(n,s) = 2 Gamma(n/2+1-s) / (4^s pi^{n/2} Gamma(s))

is the analytic gradient of the inverse fractional Laplacian's kernel, so no
finite differencing compounds the singularity; at s = 1 the constant reduces
to 1/|S^{n-1}| and the radial speed of a radial field equals M(r)/r^{n-1}.
The singular cell of the velocity kernel averages to zero by antisymmetry; the
singular cell of scalar kernels uses the analytic cell average.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gamma, pi

import numpy as np

from .burgers import mass_transform
from .grids import (
    CartesianGrid,
    DensityField,
    MassFunction,
    RadialProfile,
    VectorField,
    sphere_area,
)

__all__ = [
    "velocity",
    "velocity_constant",
    "velocity_from_values",
    "potential_values",
    "radial_velocity",
    "energy",
    "radial_energy",
    "bilinear_form",
    "bilinear_limit_constant",
    "log_lipschitz_modulus",
]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


def _check_exponent(s: float) -> float:
    s = float(s)
    if not 0.0 < s <= 1.0:
        raise ValueError(f"exponent s must lie in (0, 1], got {s}")
    return s


def velocity_constant(n: int, s: float) -> float:
    """C(n,s) above; equals 1/|S^{n-1}| at s = 1."""
    return 2.0 * gamma(n / 2.0 + 1.0 - s) / (4.0**s * pi ** (n / 2.0) * gamma(s))


def _riesz_constant(n: int, s: float) -> float:
    # kernel of (-Lap)^{-s}: C |z|^{2s-n}, needs n > 2s
    return gamma(n / 2.0 - s) / (4.0**s * pi ** (n / 2.0) * gamma(s))


def _angular_integral(f) -> float:
    """Integrate f(theta) over [0, pi/4] with 64-point Gauss-Legendre."""
    theta = 0.125 * pi * (_GL_NODES + 1.0)
    return float(0.125 * pi * np.sum(_GL_WEIGHTS * f(theta)))


def _cell_average_power(n: int, h: float, a: float) -> float:
    """Average of |z|^a over the cell [-h/2, h/2]^n containing the origin (a > -n... > -2)."""
    if n == 1:
        return (h / 2.0) ** a / (a + 1.0)
    rho = lambda th: (h / 2.0) / np.cos(th)
    integral = 8.0 * _angular_integral(lambda th: rho(th) ** (a + 2.0) / (a + 2.0))
    return integral / h**2


def _cell_average_log(h: float) -> float:
    """Average of ln|z| over the square cell of side h centered at the origin."""
    rho = lambda th: (h / 2.0) / np.cos(th)
    integral = 8.0 * _angular_integral(lambda th: 0.5 * rho(th) ** 2 * (np.log(rho(th)) - 0.5))
    return integral / h**2


def _offsets(grid: CartesianGrid) -> np.ndarray:
    m = np.arange(2 * grid.cells)
    return np.where(m < grid.cells, m, m - 2 * grid.cells) * grid.h


@dataclass(frozen=True, eq=False)
class KernelTable:
    grid: CartesianGrid
    s: float
    velocity_fft: tuple  # rfftn of each velocity kernel component on the doubled grid
    scalar_fft: object   # rfftn of the scalar kernel, or None when not representable
    pad_shape: tuple


@lru_cache(maxsize=4)
def _kernel_table(grid: CartesianGrid, s: float) -> KernelTable:
    n = grid.n
    pad_shape = (2 * grid.cells,) * n
    axes = range(n)
    z = _offsets(grid)
    if n == 1:
        coords = (z,)
        rad = np.abs(z)
    else:
        coords = np.meshgrid(z, z, indexing="ij")
        rad = np.hypot(coords[0], coords[1])
    origin = (0,) * n

    cv = velocity_constant(n, s)
    vel_fft = []
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = rad ** (-(n + 2.0 - 2.0 * s))
        for k in range(n):
            kern = cv * coords[k] * inv
            kern[origin] = 0.0  # antisymmetric kernel averages to zero over the singular cell
            vel_fft.append(np.fft.rfftn(kern, s=pad_shape, axes=axes))

    scalar_fft = None
    if s < 1.0 and n > 2.0 * s:
        cr = _riesz_constant(n, s)
        with np.errstate(divide="ignore"):
            kern = cr * rad ** (2.0 * s - n)
        kern[origin] = cr * _cell_average_power(n, grid.h, 2.0 * s - n)
        scalar_fft = np.fft.rfftn(kern, s=pad_shape, axes=axes)
    elif s == 1.0:
        if n == 2:
            with np.errstate(divide="ignore"):
                kern = -np.log(rad) / (2.0 * pi)
            kern[origin] = -_cell_average_log(grid.h) / (2.0 * pi)
        else:
            kern = -0.5 * np.abs(z)
            kern[origin] = -grid.h / 8.0
        scalar_fft = np.fft.rfftn(kern, s=pad_shape, axes=axes)
    return KernelTable(grid, s, tuple(vel_fft), scalar_fft, pad_shape)


def _padded_fft(grid: CartesianGrid, values: np.ndarray, pad_shape):
    pad = np.zeros(pad_shape)
    pad[tuple(slice(0, grid.cells) for _ in range(grid.n))] = values
    return np.fft.rfftn(pad)


def _crop(grid: CartesianGrid, arr: np.ndarray) -> np.ndarray:
    return arr[tuple(slice(0, grid.cells) for _ in range(grid.n))]


def velocity_from_values(grid: CartesianGrid, values: np.ndarray, s: float):
    """Velocity components for a (possibly signed) cell-value array."""
    s = _check_exponent(s)
    table = _kernel_table(grid, s)
    fval = _padded_fft(grid, values, table.pad_shape)
    scale = grid.cell_volume
    return [
        scale * _crop(grid, np.fft.irfftn(fval * kf, s=table.pad_shape, axes=range(grid.n)))
        for kf in table.velocity_fft
    ]


def velocity(u: DensityField, s: float = 1.0) -> VectorField:
    """Transport velocity v = -grad (-Lap)^{-s} u as a free-space kernel convolution."""
    return VectorField(u.grid, tuple(velocity_from_values(u.grid, u.values, s)))


def potential_values(grid: CartesianGrid, values: np.ndarray, s: float) -> np.ndarray:
    """Scalar potential (-Lap)^{-s} applied to a cell-value array.

    Available for s < 1 with n > 2s (decaying kernel) and for s = 1 in n <= 2,
    where the logarithmic / linear kernel only produces meaningful numbers for
    zero-total-mass inputs or inside renormalized differences.
    """
    s = _check_exponent(s)
    table = _kernel_table(grid, s)
    if table.scalar_fft is None:
        raise ValueError(f"scalar kernel not representable for n={grid.n}, s={s}")
    fval = _padded_fft(grid, values, table.pad_shape)
    return grid.cell_volume * _crop(grid, np.fft.irfftn(fval * table.scalar_fft, s=table.pad_shape, axes=range(grid.n)))


def radial_velocity(m: MassFunction) -> RadialProfile:
    """Radial speed profile v(r) = M(r)/r^{n-1} with v(0) = 0."""
    r = m.grid.r
    vals = np.zeros_like(m.values)
    vals[1:] = m.values[1:] / r[1:] ** (m.grid.n - 1)
    return RadialProfile(m.grid, np.maximum(vals, 0.0))


# ---------------------------------------------------------------------------
# energies


def energy(u: DensityField, s: float = 1.0, reference: DensityField | None = None) -> float:
    """Interaction energy int u * (-Lap)^{-s} u dx.

    For s < 1 (with n > 2s) this is the plain convolution + quadrature value.
    For s = 1 on the plane the raw integral diverges with the box; the
    renormalized value int |grad w|^2 + 2 int u0 w with w the potential of
    (u - u0) is returned instead and requires an equal-mass reference u0.
    """
    s = _check_exponent(s)
    grid = u.grid
    cv = grid.cell_volume
    if s < 1.0:
        if grid.n <= 2.0 * s:
            raise ValueError(f"energy undefined for n={grid.n}, s={s}: potential kernel does not decay")
        p = potential_values(grid, u.values, s)
        return cv * float((u.values * p).sum())
    if grid.n != 2:
        raise ValueError("s=1 energy on Cartesian grids is the renormalized planar form only")
    if reference is None:
        raise ValueError("s=1 planar energy needs an equal-mass reference density")
    mass_u = cv * u.values.sum()
    mass_ref = cv * reference.values.sum()
    if abs(mass_u - mass_ref) > 1e-8 * max(abs(mass_u), 1e-300):
        raise ValueError(f"reference mass {mass_ref:.12g} does not match field mass {mass_u:.12g}")
    diff = u.values - reference.values
    w = potential_values(grid, diff, 1.0)
    grad_w = velocity_from_values(grid, diff, 1.0)  # components of -grad w
    grad_sq = sum(c * c for c in grad_w)
    return cv * float(grad_sq.sum()) + 2.0 * cv * float((reference.values * w).sum())


def radial_energy(u: RadialProfile) -> float:
    """int u p dx for a radial density with s = 1 in dimension n >= 3.

    Uses p(r) = int_r^inf M(rho) rho^{1-n} drho, with the exact exterior tail
    M_tot r_max^{2-n}/(n-2); the profile must vanish at the last node.
    """
    n = u.grid.n
    if n < 3:
        raise ValueError("radial s=1 energy requires n >= 3")
    if u.values[-1] != 0.0:
        raise ValueError("profile must be compactly supported inside the radial grid")
    m = mass_transform(u)
    r = u.grid.r
    g = np.zeros_like(m.values)
    g[1:] = m.values[1:] / r[1:] ** (n - 1)
    seg = 0.5 * (g[1:] + g[:-1]) * np.diff(r)
    inner = np.concatenate([[0.0], np.cumsum(seg)])
    p = (inner[-1] - inner) + m.total * u.grid.r_max ** (2 - n) / (n - 2)
    integrand = u.values * p
    return sphere_area(n) * float(np.trapezoid(integrand, u.grid.sigma))


# ---------------------------------------------------------------------------
# fractional bilinear form


def bilinear_limit_constant(n: int) -> float:
    """Limit factor of the form as s -> 1: B_s(v,v) -> K_n |S^{n-1}| ||v||_2^2 with
    K_n = Gamma(n/2)/pi^{n/2}, i.e. the product equals 2 in every dimension."""
    return gamma(n / 2.0) / pi ** (n / 2.0) * sphere_area(n)


def _bb_constant(n: int, s: float) -> float:
    r = 1.0 - s
    return 4.0**r * r * gamma(n / 2.0 + r) / (pi ** (n / 2.0) * gamma(1.0 - r))


def bilinear_form(v: DensityField, w: DensityField, s: float) -> float:
    """Symmetric fractional form B_s(v, w) for s in (0, 1) via the difference
    representation

        C(n,1-s) iint (v(x)-v(y)) (w(x)-w(y)) |x-y|^{-(n+2-2s)} dx dy.

    The double integral over the box is a direct pair sum (keep the fields
    small: at most ~4096 cells).  Pairs with one point outside the box reduce
    to 2 int v w tau with tau(x) the kernel's integral over the box complement;
    tau is evaluated exactly as a spherical tail plus a lattice correction.
    Without that tail the s -> 1 limit would be lost to truncation, since the
    divergent part of the form lives at |x-y| -> infinity.
    """
    s = float(s)
    if not 0.0 < s < 1.0:
        raise ValueError("bilinear form requires s in (0,1); at s=1 it degenerates to 2||v||_2^2")
    if v.grid != w.grid:
        raise ValueError("fields must share a grid")
    grid = v.grid
    ncells = grid.cells**grid.n
    if ncells > 4200:
        raise ValueError(f"bilinear_form is O(cells^2); {ncells} cells is too large")
    beta = grid.n + 2.0 - 2.0 * s
    pts = np.stack([c.ravel() for c in grid.centers()], axis=1)
    vv = v.values.ravel()
    ww = w.values.ravel()
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    with np.errstate(divide="ignore"):
        kern = dist**-beta
    np.fill_diagonal(kern, 0.0)
    pair = float(((vv[:, None] - vv[None, :]) * (ww[:, None] - ww[None, :]) * kern).sum())
    pair *= grid.cell_volume**2

    # tail: tau(x) = int_{outside box} |x-y|^{-beta} dy
    d_boundary = grid.half_width - np.abs(pts).max(axis=1)
    sphere_tail = sphere_area(grid.n) * d_boundary ** (2.0 * s - 2.0) / (2.0 - 2.0 * s)
    inside_far = (kern * (dist > d_boundary[:, None])).sum(axis=1) * grid.cell_volume
    tau = sphere_tail - inside_far
    tail = 2.0 * float((vv * ww * tau).sum()) * grid.cell_volume
    return _bb_constant(grid.n, s) * (pair + tail)


# ---------------------------------------------------------------------------
# velocity regularity diagnostic


def log_lipschitz_modulus(u: DensityField, max_per_axis: int = 24) -> float:
    """Smallest C with |grad p(x) - grad p(y)| <= C (||u||_1 + ||u||_inf) *
    |x-y| (|log|x-y|| 1_{|x-y|<=1/e} + 1) over a subsampled set of cell pairs
    (s = 1 velocity field)."""
    vals = u.values
    norm_scale = float(u.grid.cell_volume * vals.sum() + vals.max())
    if norm_scale == 0.0:
        return 0.0
    comps = velocity_from_values(u.grid, vals, 1.0)
    stride = max(1, int(np.ceil(u.grid.cells / max_per_axis)))
    sel = (slice(None, None, stride),) * u.grid.n
    pts = np.stack([c[sel].ravel() for c in u.grid.centers()], axis=1)
    gp = np.stack([c[sel].ravel() for c in comps], axis=1)  # -grad p, sign irrelevant
    d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
    dgp = np.sqrt(((gp[:, None, :] - gp[None, :, :]) ** 2).sum(axis=2))
    mask = d > 0
    d = d[mask]
    dgp = dgp[mask]
    modulus = d * (np.where(d <= 1.0 / np.e, np.abs(np.log(d)), 0.0) + 1.0)
    return float((dgp / (norm_scale * modulus)).max())
