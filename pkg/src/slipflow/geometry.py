"""Channel and torus geometry: grids, wall cutoffs, weights, curvature data.

The channel is the box (0, L1) x (0, L2) x (0, h), periodic in the two
tangential directions with rigid walls at z = 0 ("lower") and z = h
("upper").  The curved geometry is a solid torus described in principal
curvature coordinates (poloidal angle, toroidal angle, distance from the
boundary).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import ConfigError, DomainError, GeometryError

WALLS = ("lower", "upper")


# ---------------------------------------------------------------------------
# smooth step profile
# ---------------------------------------------------------------------------

def _exp_ramp(t, order=0):
    """Derivatives of E(t) = exp(-1/t) for t > 0, extended by zero for t <= 0."""
    t = np.asarray(t, dtype=float)
    # Below 1e-30 the value underflows to exactly zero anyway; masking avoids
    # inf * 0 in the polynomial prefactors.
    pos = t > 1e-30
    ti = np.where(pos, 1.0 / np.where(pos, t, 1.0), 0.0)
    e = np.where(pos, np.exp(-ti), 0.0)
    if order == 0:
        poly = np.ones_like(ti)
    elif order == 1:
        poly = ti**2
    elif order == 2:
        poly = ti**4 - 2.0 * ti**3
    elif order == 3:
        poly = ti**6 - 6.0 * ti**5 + 6.0 * ti**4
    else:
        raise ConfigError(f"exp ramp derivatives implemented for order <= 3, got {order}")
    return e * poly


def smoothstep(t, order=0):
    """C-infinity monotone step S(t): 0 for t <= 0, 1 for t >= 1.

    S(t) = E(t) / (E(t) + E(1-t)) with E(t) = exp(-1/t).  ``order`` selects
    the value (0) or one of the first three derivatives.
    """
    t = np.asarray(t, dtype=float)
    u = _exp_ramp(t, 0)
    v = _exp_ramp(1.0 - t, 0)
    w = u + v
    if order == 0:
        return u / w
    u1 = _exp_ramp(t, 1)
    v1 = -_exp_ramp(1.0 - t, 1)
    w1 = u1 + v1
    n = u1 * v - u * v1
    if order == 1:
        return n / w**2
    u2 = _exp_ramp(t, 2)
    v2 = _exp_ramp(1.0 - t, 2)
    w2 = u2 + v2
    n1 = u2 * v - u * v2
    if order == 2:
        return n1 / w**2 - 2.0 * n * w1 / w**3
    u3 = _exp_ramp(t, 3)
    v3 = -_exp_ramp(1.0 - t, 3)
    n2 = u3 * v + u2 * v1 - u1 * v2 - u * v3
    if order == 3:
        return (n2 / w**2 - 4.0 * n1 * w1 / w**3
                - 2.0 * n * w2 / w**3 + 6.0 * n * w1**2 / w**4)
    raise ConfigError(f"smoothstep derivatives implemented for order <= 3, got {order}")


def _check_z_range(z, h):
    z = np.asarray(z, dtype=float)
    tol = 1e-12 * max(h, 1.0)
    if np.any(z < -tol) or np.any(z > h + tol):
        raise DomainError(f"normal coordinate outside [0, {h}]: range "
                          f"[{float(np.min(z))}, {float(np.max(z))}]")
    return z


def wall_cutoff(z, wall, h, order=0):
    """Wall cutoff: 1 on the wall-side eighth of the channel, 0 beyond the quarter.

    For the lower wall the profile equals S((h/4 - z) / (h/8)) with S the
    exp-based smoothstep; the upper-wall profile is its mirror image.
    ``order`` selects a z-derivative (0..3).
    """
    z = _check_z_range(z, h)
    if wall == "upper":
        return (-1.0) ** order * wall_cutoff(h - np.asarray(z, dtype=float), "lower", h, order)
    if wall != "lower":
        raise ConfigError(f"wall must be 'lower' or 'upper', got {wall!r}")
    width = h / 8.0
    t = (h / 4.0 - z) / width
    return smoothstep(t, order) * (-1.0 / width) ** order


def wall_distance_weight(z, h):
    """Continuous piecewise-linear weight: z near the lower wall, h-z near the
    upper wall, constant h/4 across the core."""
    z = _check_z_range(z, h)
    return np.minimum(np.minimum(z, h / 4.0), h - z)


# ---------------------------------------------------------------------------
# finite-difference weights
# ---------------------------------------------------------------------------

def fd_weights(x, x0, m):
    """Weights of the order-m derivative at x0 for arbitrary nodes x (Fornberg)."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < m + 1:
        raise ConfigError(f"need at least {m + 1} nodes for derivative order {m}")
    w = np.zeros((m + 1, n))
    w[0, 0] = 1.0
    c1 = 1.0
    c4 = x[0] - x0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    w[k, i] = c1 * (k * w[k - 1, i - 1] - c5 * w[k, i - 1]) / c2
                w[0, i] = -c1 * c5 * w[0, i - 1] / c2
            for k in range(mn, 0, -1):
                w[k, j] = (c4 * w[k, j] - k * w[k - 1, j]) / c3
            w[0, j] = c4 * w[0, j] / c3
        c1 = c2
    return w[m]


# ---------------------------------------------------------------------------
# channel grid
# ---------------------------------------------------------------------------

class ChannelGrid:
    """Discretization of the periodic channel with wall-clustered normal nodes.

    Tangential nodes are uniform (Fourier collocation); normal nodes follow a
    symmetric tanh map of a uniform grid,

        z(s) = h/2 * (1 + tanh(c (2s - 1)) / tanh(c)),   s in [0, 1],

    which reduces to the identity for c = 0.  Trapezoid weights on z_nodes
    integrate exactly to h.

    Attributes:
        L1, L2, h: box dimensions
        Nx, Ny, Nz: node counts (tangential counts are mode counts as well)
        clustering: tanh map strength c
        x, y: tangential nodes, shape (Nx,), (Ny,)
        z_nodes: strictly increasing nodes in [0, h], shape (Nz,)
        z_weights: trapezoid quadrature weights, shape (Nz,)
    """

    def __init__(self, L1, L2, h, Nx, Ny, Nz, clustering=0.0):
        if min(L1, L2, h) <= 0:
            raise ConfigError(f"domain dimensions must be positive, got {(L1, L2, h)}")
        if Nx < 4 or Ny < 4 or Nx % 2 or Ny % 2:
            raise ConfigError(f"Nx, Ny must be even and >= 4, got {(Nx, Ny)}")
        if Nz < 9:
            raise ConfigError(f"Nz must be >= 9, got {Nz}")
        if clustering < 0:
            raise ConfigError(f"clustering must be >= 0, got {clustering}")
        self.L1 = float(L1)
        self.L2 = float(L2)
        self.h = float(h)
        self.Nx = int(Nx)
        self.Ny = int(Ny)
        self.Nz = int(Nz)
        self.clustering = float(clustering)

        self.dx = self.L1 / self.Nx
        self.dy = self.L2 / self.Ny
        self.x = self.dx * np.arange(self.Nx)
        self.y = self.dy * np.arange(self.Ny)

        s = np.linspace(0.0, 1.0, self.Nz)
        c = self.clustering
        if c < 1e-12:
            z = self.h * s
        else:
            z = 0.5 * self.h * (1.0 + np.tanh(c * (2.0 * s - 1.0)) / np.tanh(c))
        z[0] = 0.0
        z[-1] = self.h
        self.z_nodes = z
        dz = np.diff(z)
        if np.any(dz <= 0):
            raise ConfigError("normal nodes are not strictly increasing")
        w = np.zeros(self.Nz)
        w[:-1] += 0.5 * dz
        w[1:] += 0.5 * dz
        self.z_weights = w

        # spectral wavenumbers, broadcastable against (Nx, Ny, Nz) fields
        kx = 2.0 * np.pi * np.fft.fftfreq(self.Nx, d=self.dx)
        ky = 2.0 * np.pi * np.fft.fftfreq(self.Ny, d=self.dy)
        self.kx = kx
        self.ky = ky
        self.KX = kx[:, None, None]
        self.KY = ky[None, :, None]
        self.K2 = self.KX**2 + self.KY**2

        self._dz1 = None
        self._dz2 = None

    @property
    def cell_area(self):
        return self.dx * self.dy

    def _build_dz(self, order):
        n = self.Nz
        z = self.z_nodes
        rows, cols, vals = [], [], []
        width = 3 if order == 1 else 4

        def add_row(i, idx):
            wts = fd_weights(z[idx], z[i], order)
            rows.extend([i] * len(idx))
            cols.extend(idx)
            vals.extend(wts)

        add_row(0, list(range(width)))
        for i in range(1, n - 1):
            add_row(i, [i - 1, i, i + 1])
        add_row(n - 1, list(range(n - width, n)))
        return sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))

    @property
    def dz1(self):
        """Sparse first-derivative matrix in z (3-point interior stencils)."""
        if self._dz1 is None:
            self._dz1 = self._build_dz(1)
        return self._dz1

    @property
    def dz2(self):
        """Sparse second-derivative matrix in z (3-point interior stencils)."""
        if self._dz2 is None:
            self._dz2 = self._build_dz(2)
        return self._dz2

    def wall_derivative_weights(self, wall, npts=5):
        """One-sided first-derivative stencil at a wall (npts=5 gives 4th order).

        Returns (node indices, weights)."""
        if wall == "lower":
            idx = np.arange(npts)
            x0 = 0.0
        elif wall == "upper":
            idx = np.arange(self.Nz - npts, self.Nz)
            x0 = self.h
        else:
            raise ConfigError(f"wall must be 'lower' or 'upper', got {wall!r}")
        wts = fd_weights(self.z_nodes[idx], x0, 1)
        return idx, wts

    def dealias_mask(self):
        """2/3-rule mask over tangential wavenumbers, shape (Nx, Ny, 1)."""
        mx = np.abs(np.fft.fftfreq(self.Nx) * self.Nx) <= self.Nx / 3.0
        my = np.abs(np.fft.fftfreq(self.Ny) * self.Ny) <= self.Ny / 3.0
        return (mx[:, None] & my[None, :])[:, :, None]

    def __repr__(self):
        return (f"ChannelGrid(L1={self.L1}, L2={self.L2}, h={self.h}, "
                f"Nx={self.Nx}, Ny={self.Ny}, Nz={self.Nz}, clustering={self.clustering})")


def make_channel_grid(L1, L2, h, Nx, Ny, Nz, clustering=0.0):
    """Build a ChannelGrid (uniform tangential nodes, tanh-clustered normal nodes)."""
    return ChannelGrid(L1, L2, h, Nx, Ny, Nz, clustering)


# ---------------------------------------------------------------------------
# friction tensor
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FrictionTensor:
    """Type-(1,1) wall friction tensor in the tangential frame.

    ``entries`` has shape (2, 2) for a constant tensor or (2, 2, Nx, Ny) for a
    position-dependent one.  ``alpha_bar`` records the sampled sup of the
    matrix 2-norm (a C^0 stand-in for the smooth-norm bound used in reports).
    """
    wall: str
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.shape[:2] != (2, 2):
            raise ConfigError(f"friction entries must be 2x2(xNxxNy), got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise ConfigError("friction entries must be finite")
        if self.wall not in WALLS + ("torus-boundary",):
            raise ConfigError(f"unknown wall {self.wall!r}")
        object.__setattr__(self, "entries", entries)

    @property
    def constant(self):
        return self.entries.ndim == 2

    @property
    def alpha_bar(self):
        e = self.entries
        if self.constant:
            return float(np.linalg.norm(e, 2))
        mats = e.reshape(2, 2, -1).transpose(2, 0, 1)
        return float(np.linalg.norm(mats, 2, axis=(1, 2)).max())

    def apply(self, v):
        """Contract with a tangential field v of shape (2, ...)."""
        if self.constant:
            return np.einsum("ij,j...->i...", self.entries, v)
        return np.einsum("ij...,j...->i...", self.entries, v)


def isotropic_friction(alpha, wall):
    """Friction tensor alpha * I on the given wall."""
    return FrictionTensor(wall, alpha * np.eye(2))


# ---------------------------------------------------------------------------
# solid torus in principal curvature coordinates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusChart:
    """Solid-torus tubular chart: major radius R, minor radius r, collar a.

    The interior coordinate xi3 in [0, 3a] measures distance from the
    boundary along the inward normal; 3a < r keeps the metric determinant
    positive on the closed collar.
    """
    R: float
    r: float
    a: float

    def __post_init__(self):
        if not (0 < self.r < self.R):
            raise GeometryError(f"need 0 < r < R, got r={self.r}, R={self.R}")
        if not (0 < 3.0 * self.a < self.r):
            raise GeometryError(f"need 0 < 3a < r, got a={self.a}, r={self.r}")

    @property
    def collar(self):
        return 3.0 * self.a


def torus_surface_point(chart, eta1, eta2):
    """Torus surface embedding: (R + r cos eta1)(cos eta2, sin eta2, 0) + (0, 0, r sin eta1)."""
    eta1, eta2 = np.broadcast_arrays(np.asarray(eta1, float), np.asarray(eta2, float))
    rho = chart.R + chart.r * np.cos(eta1)
    return np.stack([rho * np.cos(eta2), rho * np.sin(eta2), chart.r * np.sin(eta1)], axis=-1)


def torus_outer_normal(chart, eta1, eta2):
    """Unit outer normal on the torus surface."""
    eta1, eta2 = np.broadcast_arrays(np.asarray(eta1, float), np.asarray(eta2, float))
    return np.stack([np.cos(eta1) * np.cos(eta2),
                     np.cos(eta1) * np.sin(eta2),
                     np.sin(eta1)], axis=-1)


def torus_point(chart, eta1, eta2, xi3):
    """Point at inward distance xi3 from the torus surface point (eta1, eta2)."""
    xi3 = np.asarray(xi3, dtype=float)
    tol = 1e-12 * chart.r
    if np.any(xi3 < -tol) or np.any(xi3 > chart.collar + tol):
        raise DomainError(f"xi3 outside [0, {chart.collar}]")
    p = torus_surface_point(chart, eta1, eta2)
    n = torus_outer_normal(chart, eta1, eta2)
    return p - xi3[..., None] * n if xi3.ndim else p - xi3 * n


def torus_shape_operator(chart, eta1, eta2=None):
    """Principal curvatures (kappa1, kappa2) w.r.t. the outer normal.

    kappa1 = 1/r (poloidal direction), kappa2 = cos eta1 / (R + r cos eta1)
    (toroidal direction); both independent of eta2.
    """
    eta1 = np.asarray(eta1, dtype=float)
    k1 = np.full_like(eta1, 1.0 / chart.r)
    k2 = np.cos(eta1) / (chart.R + chart.r * np.cos(eta1))
    return k1, k2


def torus_boundary_metric(chart, eta1):
    """Diagonal surface metric entries (qt11, qt22) = (r^2, (R + r cos eta1)^2)."""
    eta1 = np.asarray(eta1, dtype=float)
    qt11 = np.full_like(eta1, chart.r**2)
    qt22 = (chart.R + chart.r * np.cos(eta1)) ** 2
    return qt11, qt22


def torus_metric(chart, eta1, eta2, xi3):
    """Collar metric diagonal (q11, q22, q33) and sqrt of its determinant.

    q_ii = (1 - kappa_i xi3)^2 qt_ii for i = 1, 2 and q33 = 1;
    sqrt(q) = (1 - kappa1 xi3)(1 - kappa2 xi3) sqrt(qt).
    """
    xi3 = np.asarray(xi3, dtype=float)
    tol = 1e-12 * chart.r
    if np.any(xi3 < -tol) or np.any(xi3 > chart.collar + tol):
        raise DomainError(f"xi3 outside [0, {chart.collar}]")
    k1, k2 = torus_shape_operator(chart, eta1, eta2)
    qt11, qt22 = torus_boundary_metric(chart, eta1)
    f1 = 1.0 - k1 * xi3
    f2 = 1.0 - k2 * xi3
    if np.any(f1 <= 0) or np.any(f2 <= 0):
        raise GeometryError("metric determinant not positive: tubular width too large")
    q11 = f1**2 * qt11
    q22 = f2**2 * qt22
    sqrt_q = f1 * f2 * np.sqrt(qt11 * qt22)
    return q11, q22, np.ones_like(q11), sqrt_q


def torus_covariant_basis(chart, eta1, eta2, xi3):
    """Covariant basis (q_1, q_2, q_3) of the collar chart, stacked on the last axis.

    q_i = (1 - kappa_i xi3) qt_i for the tangential pair and q_3 = -n.
    """
    eta1, eta2 = np.broadcast_arrays(np.asarray(eta1, float), np.asarray(eta2, float))
    rho = chart.R + chart.r * np.cos(eta1)
    qt1 = np.stack([-chart.r * np.sin(eta1) * np.cos(eta2),
                    -chart.r * np.sin(eta1) * np.sin(eta2),
                    chart.r * np.cos(eta1)], axis=-1)
    qt2 = np.stack([-rho * np.sin(eta2), rho * np.cos(eta2), np.zeros_like(rho)], axis=-1)
    n = torus_outer_normal(chart, eta1, eta2)
    k1, k2 = torus_shape_operator(chart, eta1, eta2)
    xi3 = np.asarray(xi3, dtype=float)
    g1 = (1.0 - k1 * xi3)[..., None] * qt1
    g2 = (1.0 - k2 * xi3)[..., None] * qt2
    return g1, g2, -n


# ---------------------------------------------------------------------------
# surface frames consumed by the curved corrector
# ---------------------------------------------------------------------------

class TorusFrame:
    """Principal-curvature data of the torus boundary, as used by the corrector."""

    def __init__(self, chart):
        self.chart = chart
        self.layer_width = chart.a

    def kappas(self, eta1):
        return torus_shape_operator(self.chart, eta1)

    def boundary_metric(self, eta1):
        return torus_boundary_metric(self.chart, eta1)


class FlatFrame:
    """Zero-curvature frame with identity surface metric (flat-boundary limit)."""

    def __init__(self, layer_width):
        self.layer_width = float(layer_width)

    def kappas(self, eta1):
        eta1 = np.asarray(eta1, dtype=float)
        return np.zeros_like(eta1), np.zeros_like(eta1)

    def boundary_metric(self, eta1):
        eta1 = np.asarray(eta1, dtype=float)
        return np.ones_like(eta1), np.ones_like(eta1)


def collar_cutoff(xi3, a, order=0):
    """Collar cutoff: 1 on [0, a], 0 beyond 2a, smoothstep transition between."""
    xi3 = np.asarray(xi3, dtype=float)
    if np.any(xi3 < -1e-12 * max(a, 1.0)):
        raise DomainError("xi3 must be nonnegative")
    t = (2.0 * a - xi3) / a
    return smoothstep(t, order) * (-1.0 / a) ** order


__all__ = [
    "WALLS", "smoothstep", "wall_cutoff", "wall_distance_weight", "fd_weights",
    "ChannelGrid", "make_channel_grid", "FrictionTensor", "isotropic_friction",
    "TorusChart", "torus_surface_point", "torus_outer_normal", "torus_point",
    "torus_shape_operator", "torus_boundary_metric", "torus_metric",
    "torus_covariant_basis", "TorusFrame", "FlatFrame", "collar_cutoff",
]
