"""The solvable group S = N x| A and its harmonic analysis.

A is the positive unimodular diagonal, coordinatized by the free log
vector t of length n-1 (the last diagonal entry is forced by det = 1).
The action rho(a) conjugates the unipotent factor: coordinate (i, j)
scales by a_i / a_j, with Jacobian prod_{i<j} a_i / a_j.

The invariant extension lifts a function on S to H = N x A x A by
ext(n, a, b) = f(rho(a) n, a b); convolution on S (acting in the (n, b)
slots of H) then agrees with plain additive convolution in the (n, a)
slots, which is what makes the S Fourier transform an ordinary product
transform.  Both convolution senses are implemented and compared; the
Fourier transform and Plancherel identity on S use the product measure
dn dt (the right-Haar reading that makes A-integration translation
invariant).

``a^{-i lambda}`` is read as e^{-i <lambda, t>} throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import (GridAxis, GridError, SampledFunction, dft_axis,
                    linear_axis)
from . import unipotent
from .unipotent import NCoordinates, coord_dim, coord_pairs


@dataclass(frozen=True)
class APoint:
    """Point of A in free log coordinates t (length n-1)."""

    n: int
    t: np.ndarray

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.t, dtype=float))
        object.__setattr__(self, "t", t)
        if t.shape != (self.n - 1,):
            raise GridError(f"A(n={self.n}) needs {self.n - 1} log coordinates")

    @classmethod
    def identity(cls, n: int) -> "APoint":
        return cls(n, np.zeros(n - 1))

    @property
    def diagonal(self) -> np.ndarray:
        """All n diagonal entries; the last is e^{-sum t} so the product is 1."""
        full = np.append(self.t, -self.t.sum())
        return np.exp(full)

    def matrix(self) -> np.ndarray:
        return np.diag(self.diagonal)

    def inverse(self) -> "APoint":
        return APoint(self.n, -self.t)

    def compose(self, other: "APoint") -> "APoint":
        return APoint(self.n, self.t + other.t)


def rho_scales(n: int, t: np.ndarray) -> np.ndarray:
    """Scale factors a_i/a_j per N coordinate; batched over leading dims of t.

    t has shape (..., n-1); the result has shape (..., d).
    """
    t = np.asarray(t, dtype=float)
    full = np.concatenate([t, -t.sum(axis=-1, keepdims=True)], axis=-1)
    pairs = coord_pairs(n)
    return np.exp(np.stack([full[..., i] - full[..., j] for i, j in pairs],
                           axis=-1))


def rho_action(a: APoint, x: NCoordinates) -> NCoordinates:
    """Coordinates of a n(x) a^{-1}; entry (i, j) scales by a_i/a_j."""
    if x.m != a.n:
        raise GridError(f"size mismatch: N(m={x.m}) vs A(n={a.n})")
    return NCoordinates(x.m, rho_scales(a.n, a.t) * x.coords)


def rho_jacobian(n: int, t) -> np.ndarray:
    """det of the conjugation map on N: prod_{i<j} a_i/a_j (batched over t)."""
    return rho_scales(n, t).prod(axis=-1)


@dataclass(frozen=True)
class SPoint:
    """Element (x, a) of S = N x| A."""

    x: NCoordinates
    a: APoint

    def __post_init__(self):
        if self.x.m != self.a.n:
            raise GridError("N and A parts have mismatched rank")


@dataclass(frozen=True)
class HPoint:
    """Element (x, a, b) of H = N x A x A, with rho driven by the third slot."""

    x: NCoordinates
    a: APoint
    b: APoint

    def __post_init__(self):
        if not (self.x.m == self.a.n == self.b.n):
            raise GridError("components have mismatched rank")


def s_compose(p: SPoint, q: SPoint) -> SPoint:
    """(x, a)(y, b) = (x . rho(a) y, a + b) in log coordinates."""
    return SPoint(unipotent.n_compose(p.x, rho_action(p.a, q.x)),
                  p.a.compose(q.a))


def s_inverse(p: SPoint) -> SPoint:
    return SPoint(rho_action(p.a.inverse(), unipotent.n_inverse(p.x)),
                  p.a.inverse())


def h_compose(p: HPoint, q: HPoint) -> HPoint:
    """(n, t, r)(m, s, q) = (n rho(r) m, t + s, r + q)."""
    return HPoint(unipotent.n_compose(p.x, rho_action(p.b, q.x)),
                  p.a.compose(q.a), p.b.compose(q.b))


def h_inverse(p: HPoint) -> HPoint:
    return HPoint(rho_action(p.b.inverse(), unipotent.n_inverse(p.x)),
                  p.a.inverse(), p.b.inverse())


def s_embed(p: SPoint) -> HPoint:
    """S sits inside H as b |-> (x, 0, b); rho stays driven by the S scale."""
    return HPoint(p.x, APoint.identity(p.a.n), p.a)


def a_axes(n: int, lo: float, hi: float, count: int,
           prefix: str = "a") -> list[GridAxis]:
    return [linear_axis(f"{prefix}{i + 1}", lo, hi, count)
            for i in range(n - 1)]


def _split_axes(f: SampledFunction, n: int, has_b: bool):
    d = coord_dim(n)
    n_a = n - 1
    want = d + n_a * (2 if has_b else 1)
    if len(f.axes) != want:
        raise GridError(f"expected {want} axes, got {len(f.axes)}")
    return (list(range(d)), list(range(d, d + n_a)),
            list(range(d + n_a, d + 2 * n_a)) if has_b else [])


def extend_invariant(f: SampledFunction, n: int, a_axes_new: list[GridAxis],
                     method: str = "interp") -> SampledFunction:
    """Lift f on S to ext(n, a, b) = f(rho(a) n, a + b) on H = N x A x A.

    The b axes are f's own A axes (renamed), so the a = 0 slice restricts
    to f exactly on grid nodes.  method="interp" evaluates f by multilinear
    interpolation (zero outside the box, counted in metadata);
    method="exact" requires a closed-form spec in f.metadata.
    """
    d = coord_dim(n)
    n_idx, a_idx, _ = _split_axes(f, n, has_b=False)
    b_axes = [f.axes[i].rename(f"b{k + 1}") for k, i in enumerate(a_idx)]
    axes = [f.axes[i] for i in n_idx] + list(a_axes_new) + b_axes
    mesh = np.meshgrid(*[ax.nodes for ax in axes], indexing="ij")
    n_coords = np.stack(mesh[:d], axis=-1)
    a_coords = np.stack(mesh[d:d + (n - 1)], axis=-1)
    b_coords = np.stack(mesh[d + (n - 1):], axis=-1)
    scaled_n = rho_scales(n, a_coords) * n_coords
    ab = a_coords + b_coords
    args = np.concatenate([scaled_n, ab], axis=-1)
    meta = {}
    if method == "exact":
        spec = f.metadata.get("spec")
        if spec is None:
            raise GridError("exact extension needs a closed-form spec")
        values = spec(*np.moveaxis(args, -1, 0))
    elif method == "interp":
        interp = unipotent.interpolator(f)
        flat = args.reshape(-1, args.shape[-1])
        values = interp(flat).reshape(args.shape[:-1])
        lo = np.array([ax.lo for ax in f.axes])
        hi = np.array([ax.hi for ax in f.axes])
        outside = np.any((flat < lo) | (flat > hi), axis=1)
        meta["clipped_points"] = int(outside.sum())
        meta["clipped_fraction"] = float(outside.mean())
    else:
        raise GridError(f"unknown extension method {method!r}")
    out = SampledFunction(axes, values.astype(complex), dict(f.metadata))
    out.metadata.update(meta)
    return out


def _additive_convolve(f_vals: np.ndarray, g_vals: np.ndarray,
                       f_axes_conv: list[int], g_axes_conv: list[int],
                       f_axes_all: list[GridAxis], g_all: list[GridAxis]):
    """sum_j f[k - j] g[j] w_j along the paired axes, FFT-accelerated.

    Requires the paired axes to share spacing and to be symmetric with an
    odd point count, so coordinate differences land on the grid.
    """
    wg = g_vals.astype(complex).copy()
    for pos, gi in enumerate(g_axes_conv):
        ax = g_all[gi]
        shape = [1] * wg.ndim
        shape[gi] = ax.count
        wg = wg * ax.weights.reshape(shape)
    # move conv axes last on both operands
    f_rest = [i for i in range(f_vals.ndim) if i not in f_axes_conv]
    g_rest = [i for i in range(wg.ndim) if i not in g_axes_conv]
    if g_rest:
        raise GridError("kernel must live entirely on the convolved axes")
    fv = np.moveaxis(f_vals, f_axes_conv, range(f_vals.ndim - len(f_axes_conv),
                                                f_vals.ndim))
    gv = np.transpose(wg, g_axes_conv)
    conv_shape_f = fv.shape[fv.ndim - len(f_axes_conv):]
    sizes = [nf + ng - 1 for nf, ng in zip(conv_shape_f, gv.shape)]
    conv_nd = len(sizes)
    axes_fft = tuple(range(fv.ndim - conv_nd, fv.ndim))
    F = np.fft.fftn(fv, s=sizes, axes=axes_fft)
    G = np.fft.fftn(gv, s=sizes, axes=tuple(range(conv_nd)))
    full = np.fft.ifftn(F * G, axes=axes_fft)
    slices = [slice(None)] * (fv.ndim - conv_nd)
    for fi, gi in zip(f_axes_conv, g_axes_conv):
        n_f = f_axes_all[fi].count
        # output index k maps to full index k - j_0 where y_{j0} = 0
        h = g_all[gi].spacing
        j0 = -g_all[gi].lo / h
        if abs(j0 - round(j0)) > 1e-9:
            raise GridError(
                f"axis {g_all[gi].name!r} must contain 0 for on-grid convolution")
        start = int(round(j0))
        slices.append(slice(start, start + n_f))
    out = full[tuple(slices)]
    return np.moveaxis(out, range(fv.ndim - conv_nd, fv.ndim), f_axes_conv)


def s_convolve(f: SampledFunction, g: SampledFunction, n: int,
               mode: str = "group",
               evaluator=None) -> SampledFunction:
    """Convolution of g against f over S, in either sense.

    f either lives on the S grid itself or on an H grid (extension with b
    axes); g always lives on the S grid.  mode="group" uses the semidirect
    law, acting in the (n-coords, b) slots when f is extended;
    mode="commutative" is plain additive convolution acting in the
    (n-coords, a) slots.

    ``evaluator``, if given, is a closed form for f taking one coordinate
    array per axis; the quadrature then evaluates f off-grid exactly
    instead of interpolating sampled values with zero fill.  This is the
    dual-evaluation route used to certify the convolution identity on the
    extension.
    """
    has_b = len(f.axes) == len(g.axes) + (n - 1)
    n_idx, a_idx, b_idx = _split_axes(f, n, has_b)
    gn_idx, ga_idx, _ = _split_axes(g, n, has_b=False)
    if evaluator is not None:
        shift = (b_idx if has_b else a_idx) if mode == "group" else a_idx
        return _convolve_with_evaluator(f, g, n, mode, n_idx, shift, evaluator)
    if mode == "commutative":
        vals = _additive_convolve(f.values, g.values, n_idx + a_idx,
                                  gn_idx + ga_idx, f.axes, g.axes)
        return f.with_values(vals)
    if mode != "group":
        raise GridError(f"unknown convolution mode {mode!r}")
    shift_idx = b_idx if has_b else a_idx
    if n == 2:
        return _group_convolve_rank2(f, g, n_idx, shift_idx)
    return _group_convolve_generic(f, g, n, n_idx, shift_idx)


def _convolve_with_evaluator(f, g, n, mode, n_idx, shift_idx, evaluator):
    """Quadrature over the kernel grid with exact off-grid evaluation of f."""
    d = coord_dim(n)
    mesh = f.mesh()
    base = np.stack([m.ravel() for m in mesh], axis=-1)
    g_mesh = np.meshgrid(*[ax.nodes for ax in g.axes], indexing="ij")
    g_pts = np.stack([m.ravel() for m in g_mesh], axis=-1)
    wmesh = np.ones(g.values.shape)
    for i, ax in enumerate(g.axes):
        shape = [1] * len(g.axes)
        shape[i] = ax.count
        wmesh = wmesh * ax.weights.reshape(shape)
    if mode not in ("group", "commutative"):
        raise GridError(f"unknown convolution mode {mode!r}")
    cutoff = 1e-14 * np.abs(g.values).max()
    out = np.zeros(f.values.size, dtype=complex)
    cols = [base[:, i].copy() for i in range(base.shape[1])]
    for pt, gv, w in zip(g_pts, g.values.ravel(), wmesh.ravel()):
        if abs(gv) <= cutoff:
            continue
        m_c, q_c = pt[:d], pt[d:]
        if mode == "commutative":
            rel = base[:, :d] - m_c
        elif d == 1:    # N is the line; the law is plain addition
            rel = rho_scales(n, -q_c) * (base[:, :d] - m_c)
        else:
            rel = rho_scales(n, -q_c) * unipotent.compose_coords(
                n, unipotent.inverse_coords(n, m_c), base[:, :d])
        args = cols.copy()
        for j in range(d):
            args[j] = rel[:, j]
        for k, idx in enumerate(shift_idx):
            args[idx] = base[:, idx] - q_c[k]
        out += (w * gv) * evaluator(*args)
    return f.with_values(out.reshape(f.values.shape))


def extension_evaluator(f: SampledFunction, n: int):
    """Closed form of the invariant extension of a spec-backed f.

    Returns a callable on (n-coords..., a-coords..., b-coords...) arrays
    evaluating f(rho(a) n, a + b) exactly.
    """
    spec = f.metadata.get("spec")
    if spec is None:
        raise GridError("f carries no closed-form spec")
    d = coord_dim(n)

    def evaluate(*coords):
        coords = [np.asarray(c, dtype=float) for c in coords]
        n_c = np.stack(coords[:d], axis=-1)
        a_c = np.stack(coords[d:d + (n - 1)], axis=-1)
        b_c = np.stack(coords[d + (n - 1):], axis=-1)
        scaled = rho_scales(n, a_c) * n_c
        args = list(np.moveaxis(scaled, -1, 0)) + list(
            np.moveaxis(a_c + b_c, -1, 0))
        return spec(*args)

    return evaluate


def _group_convolve_rank2(f, g, n_idx, shift_idx):
    """n = 2 fast path: per-q scale resample in x, then on-grid convolution.

    (g*f)(x, ..., s) = sum_q w_q [ sum_m w_m g(m, q) f(e^{-2q}(x - m), ..., s - q) ].
    """
    (xi,) = n_idx
    (si,) = shift_idx
    x_ax = f.axes[xi]
    s_ax = f.axes[si]
    q_ax = g.axes[1]
    if abs(s_ax.spacing - q_ax.spacing) > 1e-12:
        raise GridError("scale axes of f and g must share spacing")
    out = np.zeros(f.values.shape, dtype=complex)
    x = x_ax.nodes
    for qj, (q, wq) in enumerate(zip(q_ax.nodes, q_ax.weights)):
        shift_cells = q / s_ax.spacing
        if abs(shift_cells - round(shift_cells)) > 1e-9:
            raise GridError("scale shift is off-grid; align the A axes")
        shift_cells = int(round(shift_cells))
        shifted = _roll_zero(f.values, shift_cells, axis=si)
        # resample along x at e^{-2q} * x (linear, zero outside)
        scaled = _interp_axis(shifted, x, np.exp(-2.0 * q) * x, axis=xi)
        kernel = g.values[:, qj] * g.axes[0].weights
        conv = _conv_1d_aligned(scaled, kernel, x_ax, g.axes[0], axis=xi)
        out += wq * conv
    return f.with_values(out)


def _roll_zero(values, cells, axis):
    """Shift values by `cells` along axis, zero-filling (no wraparound).

    Result[k] = values[k - cells]."""
    if cells == 0:
        return values
    out = np.zeros_like(values)
    src = [slice(None)] * values.ndim
    dst = [slice(None)] * values.ndim
    if cells > 0:
        dst[axis] = slice(cells, None)
        src[axis] = slice(None, -cells)
    else:
        dst[axis] = slice(None, cells)
        src[axis] = slice(-cells, None)
    out[tuple(dst)] = values[tuple(src)]
    return out


def _interp_axis(values, nodes, targets, axis):
    """Linear resample along one axis at target coordinates (zero outside)."""
    idx = np.searchsorted(nodes, targets) - 1
    idx = np.clip(idx, 0, nodes.size - 2)
    frac = (targets - nodes[idx]) / (nodes[idx + 1] - nodes[idx])
    inside = (targets >= nodes[0]) & (targets <= nodes[-1])
    lo = np.take(values, idx, axis=axis)
    hi = np.take(values, idx + 1, axis=axis)
    shape = [1] * values.ndim
    shape[axis] = targets.size
    frac = frac.reshape(shape)
    mask = inside.reshape(shape)
    return (lo * (1 - frac) + hi * frac) * mask


def _conv_1d_aligned(values, kernel, f_ax, g_ax, axis):
    """out[k] = sum_j values[k - j + j0] kernel[j], j0 the index of y = 0."""
    n_f = f_ax.count
    size = n_f + kernel.size - 1
    F = np.fft.fft(values, n=size, axis=axis)
    shape = [1] * values.ndim
    shape[axis] = size
    G = np.fft.fft(kernel, n=size).reshape(shape)
    full = np.fft.ifft(F * G, axis=axis)
    j0 = -g_ax.lo / g_ax.spacing
    start = int(round(j0))
    sl = [slice(None)] * values.ndim
    sl[axis] = slice(start, start + n_f)
    return full[tuple(sl)]


def _group_convolve_generic(f, g, n, n_idx, shift_idx):
    """Loop over kernel nodes; used for n >= 3 where N is noncommutative."""
    d = coord_dim(n)
    interp = unipotent.interpolator(f)
    mesh = f.mesh()
    out = np.zeros(f.values.size, dtype=complex)
    g_mesh = np.meshgrid(*[ax.nodes for ax in g.axes], indexing="ij")
    g_pts = np.stack([m.ravel() for m in g_mesh], axis=-1)
    wmesh = np.ones(g.values.shape)
    for i, ax in enumerate(g.axes):
        shape = [1] * len(g.axes)
        shape[i] = ax.count
        wmesh = wmesh * ax.weights.reshape(shape)
    base = np.stack([m.ravel() for m in mesh], axis=-1)
    for pt, gv, w in zip(g_pts, g.values.ravel(), wmesh.ravel()):
        if gv == 0:
            continue
        m_c, q_c = pt[:d], pt[d:]
        args = base.copy()
        rel = unipotent.compose_coords(
            n, unipotent.inverse_coords(n, m_c), base[:, :d])
        args[:, :d] = rho_scales(n, -q_c) * rel
        args[:, shift_idx] = base[:, shift_idx] - q_c
        out += (w * gv) * interp(args)
    return f.with_values(out.reshape(f.values.shape))


def s_fourier(f: SampledFunction, n: int, sign: int = -1) -> SampledFunction:
    """Fourier transform over every axis of the S (or H) grid.

    N axes go to xi frequencies, the first A block to lambda (or mu on an
    H grid), b axes to nu.  sign +1 inverts a spectrum.
    """
    out = f
    for ax in list(f.axes):
        if ax.kind == "frequency":
            out = dft_axis(out, ax.name, sign)
        else:
            prefix = ("nu" if ax.name.startswith("b") else
                      "lambda" if ax.name.startswith("a") else "xi")
            out = dft_axis(out, ax.name, sign, dual_name=f"{prefix}_{ax.name}")
    return out


def integrate_axis(f: SampledFunction, axis: str) -> SampledFunction:
    """Integrate out one axis (weights times normalizer)."""
    idx = f.axis_index(axis)
    ax = f.axes[idx]
    vals = np.tensordot(f.values, ax.weights * ax.measure_normalizer,
                        axes=([idx], [0]))
    axes = [a for i, a in enumerate(f.axes) if i != idx]
    return SampledFunction(axes, vals, dict(f.metadata))


def slice_axis_at(f: SampledFunction, axis: str, value: float) -> SampledFunction:
    """Exact-node slice of one axis (the node must exist on the grid)."""
    idx = f.axis_index(axis)
    pos = int(np.argmin(np.abs(f.axes[idx].nodes - value)))
    if abs(f.axes[idx].nodes[pos] - value) > 1e-9:
        raise GridError(f"axis {axis!r} has no node at {value}")
    vals = np.take(f.values, pos, axis=idx)
    axes = [a for i, a in enumerate(f.axes) if i != idx]
    return SampledFunction(axes, vals, dict(f.metadata))


def lemma41_spectral_check(f: SampledFunction, g: SampledFunction, n: int,
                           a_axes_new: list[GridAxis],
                           mode: str = "group",
                           extension: str = "interp") -> dict:
    """Spectral form of the convolution identity on the extension.

    Checks that integrating the full transform of g * ext(f) over the nu
    frequencies reproduces the product of the transforms of the b = 0
    slice of ext(f) and of g.  Returns the two spectral fields and the
    normalized sup deviation.
    """
    ext = extend_invariant(f, n, a_axes_new, method=extension)
    conv = s_convolve(ext, g, n, mode=mode)
    spec = s_fourier(conv, n)
    lhs = spec
    for ax in list(spec.axes):
        if ax.name.startswith("nu_"):
            lhs = integrate_axis(lhs, ax.name)
    slice0 = ext
    for ax in list(ext.axes):
        if ax.name.startswith("b"):
            slice0 = slice_axis_at(slice0, ax.name, 0.0)
    rhs_f = s_fourier(slice0, n)
    rhs_g = s_fourier(g, n)
    rhs_vals = rhs_f.values * rhs_g.values
    scale = max(np.abs(rhs_vals).max(), 1e-30)
    dev = np.abs(lhs.values - rhs_vals).max() / scale
    return {"lhs": lhs.values, "rhs": rhs_vals, "max_rel_deviation": float(dev),
            "clipped_points": ext.metadata.get("clipped_points", 0)}
