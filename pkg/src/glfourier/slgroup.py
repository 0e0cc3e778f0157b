"""The combined Fourier transform on SL(n,R) through its Iwasawa charts.

A function on G is stored as a tensor over the (n-coords, log-A, K) grid;
the chart tag in the metadata says in which product order the coordinates
multiply.  Adjacent swaps of the a and n factors are coordinate shears by
the conjugation action (kan <-> kna, ank <-> nak); moving k across is a
genuine re-factorization through QR.

Haar measure carries the density 1 in the ank and kna orders, a^{-2rho}
in nak and a^{+2rho} in kan, where a^{2rho} = prod_{i<j} a_i/a_j is the
Jacobian of conjugation on N.  The combined transform pairs the Euclidean
kernel on the N block, the abelian kernel on the log-A block and the
Peter-Weyl kernel gamma(k)^* on K; its Plancherel identity is the product
identity of the three factors, and the order tensions of the chart
picture are verified separately (order consistency, the convolution
identity at the identity, cross-order Haar integration).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .grids import (GridAxis, GridError, SampledFunction, dft_axis,
                    integrate, linear_axis, make_test_function)
from . import rotations
from .rotations import SO2, SO3, IrrepLabel, KElement
from .solvable import APoint, rho_action, rho_jacobian, rho_scales
from .unipotent import NCoordinates, coord_dim, default_axis_names

ORDERS = ("kan", "kna", "ank", "nak")


@dataclass(frozen=True)
class GPoint:
    """Point of SL(n,R) in Iwasawa coordinates with a product-order tag."""

    n: int
    k: KElement
    a: APoint
    x: NCoordinates
    order: str = "nak"

    def __post_init__(self):
        if self.order not in ORDERS:
            raise GridError(f"unknown order tag {self.order!r}")

    def matrix(self) -> np.ndarray:
        parts = {"k": self.k.matrix(), "a": self.a.matrix(),
                 "n": _embed_n(self.n, self.x.coords)}
        out = np.eye(self.n)
        for c in self.order:
            out = out @ parts[c]
        return out

    @classmethod
    def identity(cls, n: int, order: str = "nak") -> "GPoint":
        group = SO2 if n == 2 else SO3
        return cls(n, KElement.identity(group), APoint.identity(n),
                   NCoordinates.identity(n), order)


def _embed_n(n, coords):
    from .unipotent import embed
    return embed(n, coords)


def gpoint_from_matrix(g: np.ndarray, n: int, order: str = "nak") -> GPoint:
    coords = chart_coords(np.asarray(g, dtype=float)[None, ...], n, order)[0]
    return gpoint_from_coords(coords, n, order)


def gpoint_from_coords(coords: np.ndarray, n: int, order: str) -> GPoint:
    d = coord_dim(n)
    x = NCoordinates(n, coords[:d])
    a = APoint(n, coords[d:d + n - 1])
    if n == 2:
        k = KElement.so2(coords[d + n - 1])
    else:
        k = KElement.so3(*coords[d + n - 1:])
    return GPoint(n, k, a, x, order)


def convert_order(p: GPoint, order: str) -> GPoint:
    """Re-express a point in another product order.

    kan <-> kna and ank <-> nak are exact shears through the conjugation
    action; other conversions re-factorize the matrix.
    """
    if order == p.order:
        return p
    key = (p.order, order)
    if key in (("kan", "kna"), ("ank", "nak")):
        return GPoint(p.n, p.k, p.a, rho_action(p.a, p.x), order)
    if key in (("kna", "kan"), ("nak", "ank")):
        return GPoint(p.n, p.k, p.a, rho_action(p.a.inverse(), p.x), order)
    return gpoint_from_matrix(p.matrix(), p.n, order)


def chart_coords(mats: np.ndarray, n: int, order: str) -> np.ndarray:
    """Batched chart extraction: (..., n, n) -> (..., d + n-1 + k_dim).

    Coordinates are packed as (n-coords, log-A, K angles) regardless of
    the product order.
    """
    mats = np.asarray(mats, dtype=float)
    if n == 2:
        return _chart2(mats, order)
    return _chart3(mats, order)


def _chart2(g, order):
    g00, g01 = g[..., 0, 0], g[..., 0, 1]
    g10, g11 = g[..., 1, 0], g[..., 1, 1]
    if order in ("kan", "kna"):
        c = np.hypot(g00, g10)
        theta = np.arctan2(g10, g00)
        t = np.log(c)
        x = (g00 * g01 + g10 * g11) / (c * c)
        if order == "kna":
            x = np.exp(2 * t) * x
    else:
        c = np.hypot(g11, g10)
        theta = -np.arctan2(-g10, g11)
        t = -np.log(c)
        x = (g11 * (-g01) + (-g10) * g00) / (c * c)
        x = -x
        if order == "ank":
            x = np.exp(-2 * t) * x
    return np.stack([x, t, theta % (2 * np.pi)], axis=-1)


def _chart3(g, order):
    if order in ("kan", "kna"):
        q, r = np.linalg.qr(g)
    else:
        q, r = np.linalg.qr(np.linalg.inv(g))
    signs = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    signs = np.where(signs == 0, 1.0, signs)
    q = q * signs[..., None, :]
    r = r * signs[..., :, None]
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    nmat = r / diag[..., :, None]
    if order in ("kan", "kna"):
        k = q
        t = np.log(diag[..., :2])
        x = _extract_n(nmat, 3)
        if order == "kna":
            x = rho_scales(3, t) * x
    else:
        # g^{-1} = k0 a0 n0  =>  g = n0^{-1} a0^{-1} k0^{-1}
        k = np.swapaxes(q, -1, -2)
        t = -np.log(diag[..., :2])
        n_inv = np.linalg.inv(nmat)
        x = _extract_n(n_inv, 3)
        if order == "ank":
            x = rho_scales(3, -t) * x
    angles = _euler_zyz(k)
    return np.concatenate([x, t, angles], axis=-1)


def _extract_n(mats, n):
    from .unipotent import extract
    return extract(mats)


def _euler_zyz(r):
    """Batched ZYZ Euler extraction; poles resolved with gamma = 0."""
    cb = np.clip(r[..., 2, 2], -1.0, 1.0)
    beta = np.arccos(cb)
    sb = np.sin(beta)
    generic = sb > 1e-12
    alpha = np.where(generic, np.arctan2(r[..., 1, 2], r[..., 0, 2]), 0.0)
    gamma = np.where(generic, np.arctan2(r[..., 2, 1], -r[..., 2, 0]), 0.0)
    pole_plus = (~generic) & (cb > 0)
    pole_minus = (~generic) & (cb <= 0)
    alpha = np.where(pole_plus, np.arctan2(r[..., 1, 0], r[..., 0, 0]), alpha)
    alpha = np.where(pole_minus, np.arctan2(-r[..., 1, 0], -r[..., 0, 0]), alpha)
    return np.stack([alpha % (2 * np.pi), beta, gamma % (2 * np.pi)], axis=-1)


def chart_matrices(coords: np.ndarray, n: int, order: str) -> np.ndarray:
    """Batched inverse of chart_coords: coordinates -> matrices."""
    coords = np.asarray(coords, dtype=float)
    d = coord_dim(n)
    from .unipotent import embed
    nmat = embed(n, coords[..., :d])
    t = coords[..., d:d + n - 1]
    full = np.concatenate([t, -t.sum(axis=-1, keepdims=True)], axis=-1)
    amat = np.zeros(coords.shape[:-1] + (n, n))
    idx = np.arange(n)
    amat[..., idx, idx] = np.exp(full)
    if n == 2:
        th = coords[..., d + n - 1]
        c, s = np.cos(th), np.sin(th)
        kmat = np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)
    else:
        al, be, ga = (coords[..., d + n - 1 + i] for i in range(3))
        kmat = _rotz_batch(al) @ _roty_batch(be) @ _rotz_batch(ga)
    parts = {"n": nmat, "a": amat, "k": kmat}
    out = None
    for ch in order:
        out = parts[ch] if out is None else out @ parts[ch]
    return out


def _rotz_batch(a):
    c, s = np.cos(a), np.sin(a)
    z, o = np.zeros_like(a), np.ones_like(a)
    return np.stack([np.stack([c, -s, z], -1), np.stack([s, c, z], -1),
                     np.stack([z, z, o], -1)], -2)


def _roty_batch(b):
    c, s = np.cos(b), np.sin(b)
    z, o = np.zeros_like(b), np.ones_like(b)
    return np.stack([np.stack([c, z, s], -1), np.stack([z, o, z], -1),
                     np.stack([-s, z, c], -1)], -2)


def g_axes(n: int, n_box: float, n_count: int, a_box: float, a_count: int,
           k_counts) -> list[GridAxis]:
    """Standard tensor grid for SL(n,R): N axes, log-A axes, K axes."""
    axes = [linear_axis(name, -n_box, n_box, n_count)
            for name in default_axis_names(n)]
    axes += [linear_axis(f"a{i + 1}", -a_box, a_box, a_count)
             for i in range(n - 1)]
    axes += rotations.k_axes(SO2 if n == 2 else SO3, k_counts)
    return axes


def axis_blocks(f: SampledFunction, n: int):
    d = coord_dim(n)
    k_dim = 1 if n == 2 else 3
    total = d + (n - 1) + k_dim
    if len(f.axes) != total:
        raise GridError(f"SL({n}) grid needs {total} axes, got {len(f.axes)}")
    return (list(range(d)), list(range(d, d + n - 1)),
            list(range(d + n - 1, total)))


def separable_test_function(axes: list[GridAxis], n: int, n_spec, a_spec,
                            k_spec) -> SampledFunction:
    """Outer product of closed-form factors on the N, A and K blocks.

    The exact evaluator is recorded in the metadata so chart-level checks
    (involution, order consistency) can evaluate off-grid without
    interpolation error.
    """
    n_idx, a_idx, k_idx = axis_blocks(
        SampledFunction(axes, np.zeros(tuple(ax.count for ax in axes))), n)
    fn = make_test_function(n_spec, [axes[i] for i in n_idx])
    fa = make_test_function(a_spec, [axes[i] for i in a_idx])
    fk = make_test_function(k_spec, [axes[i] for i in k_idx])
    values = np.multiply.outer(np.multiply.outer(fn.values, fa.values),
                               fk.values)
    d = coord_dim(n)

    def evaluator(*coords):
        return (n_spec(*coords[:d]) * a_spec(*coords[d:d + n - 1])
                * k_spec(*coords[d + n - 1:]))

    meta = {"evaluator": evaluator,
            "components": (n_spec, a_spec, k_spec),
            "warnings": fn.metadata["warnings"] + fa.metadata["warnings"]}
    return SampledFunction(axes, values, meta)


def haar_density(f: SampledFunction, n: int, order: str) -> np.ndarray:
    """Per-node density of Haar measure in the given chart order."""
    if order not in ORDERS:
        raise GridError(f"unknown order tag {order!r}")
    if order in ("ank", "kna"):
        return np.ones(f.values.shape)
    _, a_idx, _ = axis_blocks(f, n)
    mesh = np.meshgrid(*[f.axes[i].nodes for i in a_idx], indexing="ij")
    t = np.stack(mesh, axis=-1)
    jac = rho_jacobian(n, t)
    shape = [1] * len(f.axes)
    for pos, i in enumerate(a_idx):
        shape[i] = f.axes[i].count
    jac = jac.reshape(shape)
    jac = np.broadcast_to(jac if order == "kan" else 1.0 / jac,
                          f.values.shape)
    return np.asarray(jac)


def haar_integrate(f: SampledFunction, n: int, order: str) -> complex:
    """Quadrature of f against Haar measure read in the given chart order."""
    weighted = f.with_values(f.values * haar_density(f, n, order))
    return integrate(weighted)


def g_interpolator(f: SampledFunction):
    """Multilinear interpolator over the G grid, periodic in angle axes."""
    nodes = []
    values = f.values
    for i, ax in enumerate(f.axes):
        if ax.kind == "angle":
            nodes.append(np.append(ax.nodes, 2 * np.pi))
            first = np.take(values, [0], axis=i)
            values = np.concatenate([values, first], axis=i)
        else:
            nodes.append(ax.nodes)
    return RegularGridInterpolator(tuple(nodes), values, method="linear",
                                   bounds_error=False, fill_value=0.0)


def evaluate_on_g(f: SampledFunction, coords: np.ndarray, n: int) -> np.ndarray:
    """Evaluate f at packed chart coordinates, exactly if a closed form exists."""
    ev = f.metadata.get("evaluator")
    if ev is not None:
        return ev(*np.moveaxis(coords, -1, 0))
    interp = g_interpolator(f)
    k_start = coord_dim(n) + (n - 1)
    fixed = coords.copy()
    fixed[..., k_start] %= 2 * np.pi          # angle axes wrap
    if n == 3:
        fixed[..., k_start + 2] %= 2 * np.pi
    return interp(fixed.reshape(-1, coords.shape[-1])).reshape(coords.shape[:-1])


def involution(f: SampledFunction, n: int) -> SampledFunction:
    """f_check(g) = conj f(g^{-1}), with g^{-1} re-factorized into the chart."""
    order = f.metadata.get("chart", "nak")
    n_idx, a_idx, k_idx = axis_blocks(f, n)
    mesh = np.meshgrid(*[ax.nodes for ax in f.axes], indexing="ij")
    coords = np.stack(mesh, axis=-1)
    mats = chart_matrices(coords, n, order)
    inv = np.linalg.inv(mats)
    inv_coords = chart_coords(inv, n, order)
    vals = np.conj(evaluate_on_g(f, inv_coords, n))
    out = f.with_values(vals.astype(complex))
    out.metadata.pop("evaluator", None)
    out.metadata.pop("spec", None)
    return out


def upsilon_extend(f: SampledFunction, n: int) -> SampledFunction:
    """Extension to G x K: ups(g, k1) = f(g k1); exact roll on the angle grid."""
    if n != 2:
        raise GridError("the extension to G x K is wired for n = 2 only")
    theta_ax = f.axes[-1]
    k1_ax = theta_ax.rename("theta1")
    count = theta_ax.count
    stack = [np.roll(f.values, -j, axis=-1) for j in range(count)]
    values = np.stack(stack, axis=-1)
    return SampledFunction(list(f.axes) + [k1_ax], values, dict(f.metadata))


def upsilon_convolve(f: SampledFunction, psi: SampledFunction, n: int,
                     points: list[tuple[np.ndarray, float]]) -> np.ndarray:
    """(ups(f) * psi)(g, k1) = integral of f(g g2^{-1} k1) psi(g2) dg2.

    ``points`` holds (chart coordinates of g, theta1) pairs; psi lives on
    the storage grid and is integrated with its chart's Haar density.
    """
    if n != 2:
        raise GridError("the extension machinery is wired for n = 2 only")
    order = psi.metadata.get("chart", "nak")
    mesh = np.meshgrid(*[ax.nodes for ax in psi.axes], indexing="ij")
    coords = np.stack(mesh, axis=-1).reshape(-1, len(psi.axes))
    g2 = chart_matrices(coords, n, order)
    g2_inv = np.linalg.inv(g2)
    density = haar_density(psi, n, order).ravel()
    wmesh = np.ones(psi.values.shape)
    for i, ax in enumerate(psi.axes):
        shape = [1] * len(psi.axes)
        shape[i] = ax.count
        wmesh = wmesh * (ax.weights * ax.measure_normalizer).reshape(shape)
    weights = wmesh.ravel() * density * psi.values.ravel()
    out = np.empty(len(points), dtype=complex)
    for idx, (g_coords, theta1) in enumerate(points):
        g_mat = chart_matrices(np.asarray(g_coords, dtype=float), n, order)
        k1 = KElement.so2(theta1).matrix()
        total_mats = g_mat @ g2_inv @ k1
        args = chart_coords(total_mats, n, order)
        out[idx] = np.sum(weights * evaluate_on_g(f, args, n))
    return out


@dataclass
class SpectralTable:
    """Operator-valued spectrum over (xi grid) x (lambda grid) x irreps."""

    group_n: int
    freq_axes: list[GridAxis]
    blocks: dict

    @property
    def labels(self) -> list[IrrepLabel]:
        return list(self.blocks.keys())

    def norm_squared(self) -> float:
        """sum_gamma d_gamma integral ||T||_HS^2 over the frequency grid."""
        wm = np.ones(tuple(ax.count for ax in self.freq_axes))
        for i, ax in enumerate(self.freq_axes):
            shape = [1] * len(self.freq_axes)
            shape[i] = ax.count
            wm = wm * (ax.weights * ax.measure_normalizer).reshape(shape)
        total = 0.0
        for label, block in self.blocks.items():
            hs = np.sum(np.abs(block) ** 2, axis=(-2, -1))
            total += label.dim * float(np.sum(wm * hs))
        return total

    def to_csv(self, path: str):
        rows = []
        mesh = np.meshgrid(*[ax.nodes for ax in self.freq_axes], indexing="ij")
        flat = [m.ravel() for m in mesh]
        for label, block in self.blocks.items():
            d = label.dim
            for i in range(d):
                for j in range(d):
                    entry = block[..., i, j].ravel()
                    for pos in range(entry.size):
                        rows.append([*(c[pos] for c in flat), label.index,
                                     i, j, entry[pos].real, entry[pos].imag])
        header = ",".join([ax.name for ax in self.freq_axes]
                          + ["irrep", "row", "col", "re", "im"])
        np.savetxt(path, np.asarray(rows), delimiter=",", header=header,
                   comments="")

    def summary_json(self) -> str:
        per = {str(label.index): float(np.sum(np.abs(block) ** 2))
               for label, block in self.blocks.items()}
        return json.dumps({"n": self.group_n, "hs_norm_sq_by_irrep": per,
                           "norm_squared": self.norm_squared()})


def sl_fourier(f: SampledFunction, n: int, l_max: int) -> SpectralTable:
    """Combined transform: Euclidean on N, abelian on log-A, Peter-Weyl on K."""
    n_idx, a_idx, k_idx = axis_blocks(f, n)
    out = f
    for i in n_idx:
        out = dft_axis(out, f.axes[i].name, -1, dual_name=f"xi_{f.axes[i].name}")
    for i in a_idx:
        out = dft_axis(out, f.axes[i].name, -1,
                       dual_name=f"lambda_{f.axes[i].name}")
    group = SO2 if n == 2 else SO3
    k_axes = [out.axes[i] for i in k_idx]
    stack = rotations.irrep_stack(group, k_axes, l_max)
    wmesh = np.ones(tuple(ax.count for ax in k_axes))
    for i, ax in enumerate(k_axes):
        shape = [1] * len(k_axes)
        shape[i] = ax.count
        wmesh = wmesh * (ax.weights * ax.measure_normalizer).reshape(shape)
    vals = out.values.reshape(out.values.shape[:k_idx[0]] + (-1,))
    blocks = {}
    for label, d_grid in stack.items():
        dmat = d_grid.reshape(-1, label.dim, label.dim)
        kernel = (wmesh.ravel()[:, None, None] * dmat.conj())
        # Tf[i, j] = sum_x w f gamma(x)^*[i, j] = sum_x w f conj(gamma[j, i])
        blocks[label] = np.einsum("...x,xji->...ij", vals, kernel)
    freq_axes = [out.axes[i] for i in n_idx + a_idx]
    return SpectralTable(n, freq_axes, blocks)


def sl_invert(table: SpectralTable, coords: np.ndarray, n: int) -> complex:
    """Pointwise inversion at packed chart coordinates (n, a, k angles)."""
    coords = np.asarray(coords, dtype=float)
    d = coord_dim(n)
    phase = None
    for i, ax in enumerate(table.freq_axes):
        p = (ax.weights * ax.measure_normalizer) * np.exp(
            1j * ax.nodes * coords[i])
        phase = p if phase is None else np.multiply.outer(phase, p)
    if n == 2:
        k = KElement.so2(coords[d + n - 1])
    else:
        k = KElement.so3(*coords[d + n - 1:])
    total = 0.0 + 0.0j
    for label, block in table.blocks.items():
        gam = rotations.irrep_matrix(label, k)
        tr = np.einsum("...ij,ji->...", block, gam)
        total += label.dim * np.sum(phase * tr)
    return complex(total)


def invert_at_identity(table: SpectralTable) -> complex:
    """f(e) = sum_gamma d_gamma integral tr T(xi, lambda, gamma)."""
    wm = None
    for ax in table.freq_axes:
        w = ax.weights * ax.measure_normalizer
        wm = w if wm is None else np.multiply.outer(wm, w)
    total = 0.0 + 0.0j
    for label, block in table.blocks.items():
        tr = np.einsum("...ii->...", block)
        total += label.dim * np.sum(wm * tr)
    return complex(total)


def order_consistency_fields(f: SampledFunction, n: int,
                             xi_values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of the kna/kan order switch for the N-frequency integral.

    Left: the storage tensor read as the kna chart, integrated against
    e^{-i xi n} over everything.  Right: the same abstract function read
    through the kan chart (a shear of the first block), integrated against
    the conjugated frequency kernel with the a^{2rho} density.  Requires a
    closed-form evaluator (n = 2).
    """
    if n != 2:
        raise GridError("order consistency check is wired for n = 2")
    components = f.metadata.get("components")
    if components is None:
        raise GridError("order consistency needs the separable closed form")
    n_spec, a_spec, k_spec = components
    n_idx, a_idx, k_idx = axis_blocks(f, n)
    x_ax, a_ax, th_ax = (f.axes[n_idx[0]], f.axes[a_idx[0]], f.axes[k_idx[0]])
    x = x_ax.nodes[:, None]
    t = a_ax.nodes[None, :]
    w2 = np.outer(x_ax.weights, a_ax.weights)
    k_factor = complex(np.sum(k_spec(th_ax.nodes) * th_ax.weights)
                       * th_ax.measure_normalizer)
    phi_psi = n_spec(x) * a_spec(t)
    sheared = n_spec(np.exp(2 * t) * x) * a_spec(t)
    xi_values = np.asarray(xi_values, dtype=float)
    lhs = np.empty(xi_values.size, dtype=complex)
    rhs = np.empty(xi_values.size, dtype=complex)
    for idx, xi in enumerate(xi_values):
        lhs[idx] = k_factor * np.sum(w2 * phi_psi * np.exp(-1j * xi * x))
        kern = np.exp(-1j * np.exp(2 * t) * xi * x) * np.exp(2 * t)
        rhs[idx] = k_factor * np.sum(w2 * sheared * kern)
    return lhs, rhs


def haar_integral_via_order(f: SampledFunction, n: int, order: str,
                            base_order: str = "ank") -> complex:
    """Haar integral of the abstract function behind f, read in another order.

    f's closed form defines the function on the ``base_order`` chart; the
    grid is then reinterpreted as the ``order`` chart, each node is
    re-factorized, and the quadrature carries that order's density.
    """
    if order == base_order:
        return haar_integrate(f, n, base_order)
    ev = f.metadata.get("evaluator")
    if ev is None:
        raise GridError("cross-order integration needs a closed-form evaluator")
    mesh = np.meshgrid(*[ax.nodes for ax in f.axes], indexing="ij")
    coords = np.stack(mesh, axis=-1)
    mats = chart_matrices(coords, n, order)
    base_coords = chart_coords(mats, n, base_order)
    vals = ev(*np.moveaxis(base_coords, -1, 0))
    return haar_integrate(SampledFunction(list(f.axes), vals), n, order)


def upsilon_invariance_residual(f: SampledFunction, n: int,
                                rng: np.random.Generator,
                                trials: int = 100) -> float:
    """Two-sided residual of the G x K extension's invariance property.

    For random g in G, h in K and k1 in K, compares ups(f)(g h, h^{-1} k1)
    with f(g k1), both evaluated through the matrix route and the chart.
    """
    if n != 2:
        raise GridError("the extension machinery is wired for n = 2 only")
    order = f.metadata.get("chart", "nak")
    worst = 0.0
    for _ in range(trials):
        g_coords = np.array([rng.uniform(-2, 2), rng.uniform(-1, 1),
                             rng.uniform(0, 2 * np.pi)])
        th_h = rng.uniform(0, 2 * np.pi)
        th_k1 = rng.uniform(0, 2 * np.pi)
        g_mat = chart_matrices(g_coords, n, order)
        gh = chart_coords(g_mat @ KElement.so2(th_h).matrix(), n, order)
        # ups(f)(p, k1') = f evaluated at p with the K angle advanced by k1'
        lhs_coords = gh.copy()
        lhs_coords[-1] = (lhs_coords[-1] + (th_k1 - th_h)) % (2 * np.pi)
        gk1 = chart_coords(g_mat @ KElement.so2(th_k1).matrix(), n, order)
        lhs = evaluate_on_g(f, lhs_coords[None, :], n)[0]
        rhs = evaluate_on_g(f, gk1[None, :], n)[0]
        worst = max(worst, abs(lhs - rhs))
    return worst


def eq41_identity(f: SampledFunction, n: int) -> tuple[float, float]:
    """Both sides of the convolution-at-identity identity.

    Left: (ups(f) * f_check)(e, I_K) via the extension, the involution and
    Haar quadrature.  Right: the Haar norm of f.  Unimodularity makes them
    equal up to truncation of re-factorized points.
    """
    fc = involution(f, n)
    d = coord_dim(n)
    ident = np.zeros(d + (n - 1) + (1 if n == 2 else 3))
    lhs = upsilon_convolve(f, fc, n, [(ident, 0.0)])[0]
    order = f.metadata.get("chart", "nak")
    rhs = haar_integrate(f.with_values(np.abs(f.values) ** 2), n, order)
    return float(lhs.real), float(rhs.real)
