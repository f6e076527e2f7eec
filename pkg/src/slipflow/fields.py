"""Velocity-like fields on the channel grid and discrete derivative operators.

Tangential derivatives are spectral (Fourier collocation on the periodic
directions); normal derivatives use the grid's finite-difference matrices.
Fields are numpy arrays of shape (Nx, Ny, Nz); vector fields stack three
components on a leading axis.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .geometry import ChannelGrid


@dataclass
class VectorField:
    """Three-component field on a ChannelGrid with a free-form metadata tag.

    ``data`` has shape (3, Nx, Ny, Nz); ``tag`` records provenance
    (physical / corrector / remainder / ...).
    """
    data: np.ndarray
    grid: ChannelGrid
    tag: str = ""

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        expected = (3, self.grid.Nx, self.grid.Ny, self.grid.Nz)
        if self.data.shape != expected:
            raise InputError(f"field shape {self.data.shape} does not match grid {expected}")

    @property
    def u1(self):
        return self.data[0]

    @property
    def u2(self):
        return self.data[1]

    @property
    def u3(self):
        return self.data[2]

    def copy(self, tag=None):
        return VectorField(self.data.copy(), self.grid, self.tag if tag is None else tag)

    def __add__(self, other):
        return VectorField(self.data + other.data, self.grid, self.tag)

    def __sub__(self, other):
        return VectorField(self.data - other.data, self.grid, self.tag)

    def __mul__(self, c):
        return VectorField(self.data * c, self.grid, self.tag)

    __rmul__ = __mul__


def vector_field(u1, u2, u3, grid, tag=""):
    shape = (grid.Nx, grid.Ny, grid.Nz)
    comps = [np.broadcast_to(np.asarray(c, dtype=float), shape) for c in (u1, u2, u3)]
    return VectorField(np.stack(comps), grid, tag)


def zero_field(grid, tag=""):
    return VectorField(np.zeros((3, grid.Nx, grid.Ny, grid.Nz)), grid, tag)


# ---------------------------------------------------------------------------
# derivatives
# ---------------------------------------------------------------------------

def _spectral_axis_derivative(f, k, axis, order):
    fh = np.fft.fft(f, axis=axis)
    shape = [1] * f.ndim
    shape[axis] = -1
    fh *= (1j * k.reshape(shape)) ** order
    return np.fft.ifft(fh, axis=axis).real


def d_dx(f, grid, order=1):
    """Spectral derivative in x (axis -3)."""
    return _spectral_axis_derivative(np.asarray(f, float), grid.kx, f.ndim - 3, order)


def d_dy(f, grid, order=1):
    """Spectral derivative in y (axis -2)."""
    return _spectral_axis_derivative(np.asarray(f, float), grid.ky, f.ndim - 2, order)


def d_dz(f, grid, order=1):
    """Finite-difference derivative in z (axis -1)."""
    mat = grid.dz1 if order == 1 else grid.dz2
    if order not in (1, 2):
        raise InputError(f"z-derivative implemented for orders 1 and 2, got {order}")
    f = np.asarray(f, dtype=float)
    flat = f.reshape(-1, f.shape[-1])
    return np.asarray(mat.dot(flat.T)).T.reshape(f.shape)


def apply_z_matrix(mat, f):
    """Apply a (Nz x Nz) sparse matrix along the last axis of ``f``."""
    f = np.asarray(f)
    flat = f.reshape(-1, f.shape[-1])
    return np.asarray(mat.dot(flat.T)).T.reshape(f.shape)


def gradient(f, grid):
    """Gradient of a scalar field, shape (3, Nx, Ny, Nz)."""
    return np.stack([d_dx(f, grid), d_dy(f, grid), d_dz(f, grid)])


def divergence(u, grid):
    """Discrete divergence of a (3, Nx, Ny, Nz) array."""
    return d_dx(u[0], grid) + d_dy(u[1], grid) + d_dz(u[2], grid)


def laplacian(f, grid):
    """Spectral tangential + finite-difference normal Laplacian of a scalar field."""
    fh = np.fft.fft2(np.asarray(f, float), axes=(-3, -2))
    fh *= -grid.K2
    tang = np.fft.ifft2(fh, axes=(-3, -2)).real
    return tang + d_dz(f, grid, order=2)


def advect(u, v, grid):
    """Convective derivative (u . grad) v for stacked (3, ...) arrays."""
    out = np.empty_like(v)
    for i in range(3):
        out[i] = (u[0] * d_dx(v[i], grid)
                  + u[1] * d_dy(v[i], grid)
                  + u[2] * d_dz(v[i], grid))
    return out


def dealias(f, grid):
    """Remove tangential modes above the 2/3 cutoff."""
    fh = np.fft.fft2(np.asarray(f, float), axes=(-3, -2))
    fh *= grid.dealias_mask()
    return np.fft.ifft2(fh, axes=(-3, -2)).real


def wall_values(f, wall):
    """Restrict a (..., Nz) array to a wall plane."""
    return f[..., 0] if wall == "lower" else f[..., -1]


def wall_normal_derivative(f, grid, wall, npts=5):
    """One-sided high-order normal derivative of ``f`` at a wall, shape (..., )."""
    idx, wts = grid.wall_derivative_weights(wall, npts)
    f = np.asarray(f, dtype=float)
    return np.tensordot(f[..., idx], wts, axes=([-1], [0]))


def quad_weights(grid):
    """Quadrature weights dx*dy*w_z, shape (1, 1, Nz), broadcastable over fields."""
    return grid.cell_area * grid.z_weights[None, None, :]


def integrate(f, grid):
    """Volume integral with rectangle (tangential) x trapezoid (normal) quadrature."""
    f = np.asarray(f, dtype=float)
    return float(np.sum(f * quad_weights(grid)))


def integrate_walls(f_lower, f_upper, grid):
    """Surface integral over both wall planes of (Nx, Ny) integrands."""
    return grid.cell_area * (float(np.sum(f_lower)) + float(np.sum(f_upper)))
