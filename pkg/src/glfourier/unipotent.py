"""The unipotent upper-triangular group N: coordinates, law, convolution, Fourier.

Elements of N are m x m upper-triangular matrices with unit diagonal,
parameterized by the d = m(m-1)/2 strictly-upper entries ordered by
superdiagonals: first the entries (i, i+1), then (i, i+2) and so on.  For
m = 3 the coordinate vector is (x12, x23, x13).

Haar measure on N equals Lebesgue measure in these coordinates (the group
is unimodular and the law is unipotent-affine); this is asserted by the
translation-invariance tests rather than assumed silently.  The Fourier
transform on N is the Euclidean transform in the coordinates, axis by
axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .grids import GridAxis, GridError, SampledFunction, dft_axis


def coord_pairs(m: int) -> list[tuple[int, int]]:
    """Index pairs (i, j), i < j, in superdiagonal order (0-based)."""
    return [(i, i + s) for s in range(1, m) for i in range(m - s)]


def coord_dim(m: int) -> int:
    return m * (m - 1) // 2


@dataclass(frozen=True)
class NCoordinates:
    """A point of N given by its superdiagonal coordinate vector."""

    m: int
    coords: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        object.__setattr__(self, "coords", coords)
        if coords.shape != (coord_dim(self.m),):
            raise GridError(
                f"N(m={self.m}) needs {coord_dim(self.m)} coordinates, "
                f"got shape {coords.shape}")

    @classmethod
    def identity(cls, m: int) -> "NCoordinates":
        return cls(m, np.zeros(coord_dim(m)))


def embed(m: int, coords: np.ndarray) -> np.ndarray:
    """Coordinates -> unipotent matrices; accepts batched (..., d) input."""
    coords = np.asarray(coords, dtype=float)
    batch = coords.shape[:-1]
    out = np.zeros(batch + (m, m))
    out[..., np.arange(m), np.arange(m)] = 1.0
    for idx, (i, j) in enumerate(coord_pairs(m)):
        out[..., i, j] = coords[..., idx]
    return out


def extract(mat: np.ndarray) -> np.ndarray:
    """Unipotent matrices -> coordinates; accepts batched (..., m, m) input."""
    mat = np.asarray(mat, dtype=float)
    m = mat.shape[-1]
    out = np.empty(mat.shape[:-2] + (coord_dim(m),))
    for idx, (i, j) in enumerate(coord_pairs(m)):
        out[..., idx] = mat[..., i, j]
    return out


def compose_coords(m: int, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Group law in coordinates (batched): extract(embed(x) @ embed(y))."""
    return extract(embed(m, x) @ embed(m, y))


def inverse_coords(m: int, x: np.ndarray) -> np.ndarray:
    """Inverse in coordinates via the terminating Neumann series of U = g - I."""
    g = embed(m, x)
    u = g - np.eye(m)
    inv = np.eye(m) + np.zeros_like(g)
    term = np.eye(m) + np.zeros_like(g)
    for _ in range(1, m):
        term = -term @ u
        inv = inv + term
    return extract(inv)


def n_compose(x: NCoordinates, y: NCoordinates) -> NCoordinates:
    if x.m != y.m:
        raise GridError(f"size mismatch: m={x.m} vs m={y.m}")
    return NCoordinates(x.m, compose_coords(x.m, x.coords, y.coords))


def n_inverse(x: NCoordinates) -> NCoordinates:
    return NCoordinates(x.m, inverse_coords(x.m, x.coords))


def default_axis_names(m: int) -> list[str]:
    return [f"x{i + 1}{j + 1}" for i, j in coord_pairs(m)]


def check_n_grid(f: SampledFunction, m: int):
    """An N grid function has exactly d linear-real axes."""
    if len(f.axes) != coord_dim(m):
        raise GridError(
            f"N(m={m}) grid needs {coord_dim(m)} axes, got {len(f.axes)}")
    for ax in f.axes:
        if ax.kind != "linear-real":
            raise GridError(f"axis {ax.name!r} must be linear-real on N")


def interpolator(f: SampledFunction) -> RegularGridInterpolator:
    """Multilinear interpolation of the sampled values, zero outside the box."""
    return RegularGridInterpolator(
        tuple(ax.nodes for ax in f.axes), f.values,
        method="linear", bounds_error=False, fill_value=0.0)


def n_translate(f: SampledFunction, m: int, y: NCoordinates) -> SampledFunction:
    """Left translation (L_y f)(X) = f(y^{-1} . X) by interpolation."""
    check_n_grid(f, m)
    grid = np.stack(f.mesh(), axis=-1)
    args = compose_coords(m, inverse_coords(m, y.coords), grid)
    vals = interpolator(f)(args)
    return f.with_values(vals.reshape(f.values.shape))


def n_convolve(f: SampledFunction, g: SampledFunction, m: int,
               support_cutoff: float = 0.0) -> SampledFunction:
    """Group convolution (g * f)(X) = sum_Y w_Y f(Y^{-1} X) g(Y).

    Off-grid arguments of f are evaluated by multilinear interpolation
    with zero fill outside the truncation box.  Grid nodes of g with
    |g| <= support_cutoff * max|g| are skipped.
    """
    check_n_grid(f, m)
    check_n_grid(g, m)
    for a, b in zip(f.axes, g.axes):
        if a.count != b.count or not np.allclose(a.nodes, b.nodes):
            raise GridError(f"axis {a.name!r} differs between f and g")
    interp = interpolator(f)
    x_grid = np.stack(f.mesh(), axis=-1)            # (..., d)
    x_emb = embed(m, x_grid.reshape(-1, coord_dim(m)))
    y_flat = x_grid.reshape(-1, coord_dim(m))
    g_flat = g.values.ravel()
    wmesh = np.ones(g.values.shape)
    for i, ax in enumerate(g.axes):
        shape = [1] * len(g.axes)
        shape[i] = ax.count
        wmesh = wmesh * ax.weights.reshape(shape)
    w_flat = wmesh.ravel()
    cutoff = support_cutoff * np.max(np.abs(g_flat)) if g_flat.size else 0.0
    out = np.zeros(f.values.size, dtype=complex)
    for y, gy, wy in zip(y_flat, g_flat, w_flat):
        if abs(gy) <= cutoff:
            continue
        y_inv = embed(m, inverse_coords(m, y))
        out += (wy * gy) * interp(extract(y_inv @ x_emb))
    return f.with_values(out.reshape(f.values.shape))


def n_fourier(f: SampledFunction, m: int, sign: int = -1) -> SampledFunction:
    """Euclidean Fourier transform over all d coordinate axes of N.

    sign -1 is the forward transform; applied to a spectrum (frequency
    axes) with sign +1 it inverts back onto the source grids.
    """
    if sign == -1:
        check_n_grid(f, m)
    out = f
    for ax in list(f.axes):
        out = dft_axis(out, ax.name, sign, dual_name=f"xi_{ax.name}")
    return out


def n_axes(m: int, lo: float, hi: float, count: int) -> list[GridAxis]:
    """Convenience: identical linear axes for all d coordinates of N."""
    from .grids import linear_axis
    return [linear_axis(name, lo, hi, count) for name in default_axis_names(m)]
