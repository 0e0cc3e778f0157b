"""Tensor grids, quadrature weights, per-axis Fourier transforms and test functions.

Every transform in this package reduces to quadrature sums over the axes
defined here.  Axis kinds:

* ``linear-real``  -- uniform nodes on [lo, hi], trapezoid or midpoint weights.
* ``log-scale``    -- the multiplicative half-line sampled uniformly in
  u = log t; weights are du, i.e. the invariant measure dt/t.
* ``angle``        -- the circle [0, 2pi) with uniform nodes; raw weights sum
  to 2pi and the axis carries a 1/(2pi) normalizer so integration is
  Haar-normalized to total mass 1.
* ``euler-beta``   -- the polar Euler angle, Gauss-Legendre in cos(beta);
  raw weights sum to 2, normalizer 1/2.
* ``frequency``    -- dual of a linear/log axis, weights are the frequency
  spacing and the normalizer is 1/(2pi) per scalar dimension.

The frequency normalization convention: forward transforms use the kernel
e^{-i xi x} against the axis weights, inverse transforms use e^{+i xi x}
against d(xi)/(2pi).  With dual grids built by :func:`dft_axis` the
round-trip and the Parseval identity are exact on grid-supported data up to
floating-point error.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * np.pi

#: |values| at the grid boundary above this level trips the decay warning.
DECAY_TOLERANCE = 1e-12


class GridError(ValueError):
    """Invalid axis specification or mismatched grid operation."""


@dataclass(frozen=True)
class GridAxis:
    """One axis of a tensor grid: named nodes plus quadrature weights.

    ``measure_normalizer`` multiplies the weight product inside
    :func:`integrate`; it is 1 for plain Lebesgue axes, 1/(2pi) for angle
    and frequency axes and 1/2 for the euler-beta axis, so that compact
    directions integrate to Haar mass 1 and spectral sums carry
    d(xi)/(2pi).
    """

    name: str
    kind: str
    nodes: np.ndarray
    weights: np.ndarray
    measure_normalizer: float = 1.0
    #: for frequency axes: the spatial axis this one is dual to
    source: "GridAxis | None" = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.ndim != 1 or nodes.size < 2:
            raise GridError(f"axis {self.name!r}: need at least 2 nodes")
        if weights.shape != nodes.shape:
            raise GridError(f"axis {self.name!r}: weights/nodes length mismatch")
        if not np.all(np.diff(nodes) > 0):
            raise GridError(f"axis {self.name!r}: nodes must be strictly increasing")
        if not np.all(weights > 0):
            raise GridError(f"axis {self.name!r}: weights must be strictly positive")

    @property
    def count(self) -> int:
        return self.nodes.size

    @property
    def lo(self) -> float:
        return float(self.nodes[0])

    @property
    def hi(self) -> float:
        return float(self.nodes[-1])

    @property
    def spacing(self) -> float:
        """Uniform node spacing; raises for non-uniform axes."""
        d = np.diff(self.nodes)
        if not np.allclose(d, d[0], rtol=1e-12, atol=1e-14):
            raise GridError(f"axis {self.name!r} is not uniformly spaced")
        return float(d[0])

    def rename(self, name: str) -> "GridAxis":
        return replace(self, name=name)


def linear_axis(name: str, lo: float, hi: float, count: int,
                rule: str = "trapezoid") -> GridAxis:
    """Uniform real axis on [lo, hi] with trapezoid or midpoint weights."""
    _check_bounds(name, lo, hi, count)
    if rule == "trapezoid":
        nodes = np.linspace(lo, hi, count)
        h = (hi - lo) / (count - 1)
        weights = np.full(count, h)
        weights[0] = weights[-1] = h / 2.0
    elif rule == "midpoint":
        h = (hi - lo) / count
        nodes = lo + h * (np.arange(count) + 0.5)
        weights = np.full(count, h)
    else:
        raise GridError(f"axis {name!r}: unknown rule {rule!r}")
    return GridAxis(name, "linear-real", nodes, weights)


def log_axis(name: str, lo: float, hi: float, count: int) -> GridAxis:
    """Axis over R+* sampled uniformly in u = log t on [lo, hi] (log units).

    Nodes are stored in the log coordinate; weights are du, i.e. the
    invariant measure dt/t.
    """
    _check_bounds(name, lo, hi, count)
    nodes = np.linspace(lo, hi, count)
    h = (hi - lo) / (count - 1)
    weights = np.full(count, h)
    weights[0] = weights[-1] = h / 2.0
    return GridAxis(name, "log-scale", nodes, weights)


def angle_axis(name: str, count: int) -> GridAxis:
    """Uniform circle axis on [0, 2pi); raw weights sum to 2pi."""
    if count < 2:
        raise GridError(f"axis {name!r}: count must be >= 2")
    nodes = TWO_PI * np.arange(count) / count
    weights = np.full(count, TWO_PI / count)
    return GridAxis(name, "angle", nodes, weights, measure_normalizer=1.0 / TWO_PI)


def euler_beta_axis(name: str, count: int) -> GridAxis:
    """Polar Euler angle: Gauss-Legendre nodes in cos(beta), raw weights sum 2."""
    if count < 1:
        raise GridError(f"axis {name!r}: count must be >= 1")
    c, w = np.polynomial.legendre.leggauss(count)
    beta = np.arccos(c)[::-1]          # ascending in beta
    weights = w[::-1]
    return GridAxis(name, "euler-beta", beta, weights, measure_normalizer=0.5)


def frequency_axis_for(axis: GridAxis, name: str | None = None) -> GridAxis:
    """Canonical DFT dual of a uniform linear/log axis.

    N frequencies xi_k = (k - N//2) * 2pi/(N h) so the discrete Parseval
    identity and the inverse transform are exact on grid data.
    """
    if axis.kind not in ("linear-real", "log-scale", "frequency"):
        raise GridError(f"axis {axis.name!r}: kind {axis.kind!r} has no DFT dual")
    h = axis.spacing
    n = axis.count
    dxi = TWO_PI / (n * h)
    nodes = dxi * (np.arange(n) - n // 2)
    weights = np.full(n, dxi)
    return GridAxis(name or f"freq_{axis.name}", "frequency", nodes, weights,
                    measure_normalizer=1.0 / TWO_PI, source=axis)


_AXIS_BUILDERS = {"linear-real", "log-scale", "angle", "euler-beta"}


def build_grid(axes_spec: Iterable[dict]) -> list[GridAxis]:
    """Build a list of axes from dict descriptions (typically from config).

    Each description carries ``name``, ``kind``, ``count`` and, for
    noncompact kinds, ``lo``/``hi`` (plus optional ``rule``).
    """
    axes = []
    for spec in axes_spec:
        spec = dict(spec)
        name = spec.get("name", f"axis{len(axes)}")
        kind = spec.get("kind")
        if kind not in _AXIS_BUILDERS:
            raise GridError(f"axis {name!r}: unknown kind {kind!r}")
        count = int(spec.get("count", 0))
        if kind == "linear-real":
            axes.append(linear_axis(name, spec["lo"], spec["hi"], count,
                                    rule=spec.get("rule", "trapezoid")))
        elif kind == "log-scale":
            axes.append(log_axis(name, spec["lo"], spec["hi"], count))
        elif kind == "angle":
            axes.append(angle_axis(name, count))
        else:
            axes.append(euler_beta_axis(name, count))
    return axes


def _check_bounds(name: str, lo: float, hi: float, count: int):
    if count < 2:
        raise GridError(f"axis {name!r}: count must be >= 2, got {count}")
    if not lo < hi:
        raise GridError(f"axis {name!r}: need lo < hi, got [{lo}, {hi}]")


@dataclass
class SampledFunction:
    """Complex values on the tensor grid spanned by ``axes``.

    Treated as immutable: every operation returns a new instance.
    ``metadata`` carries provenance (test-function spec, warnings, clipped
    interpolation mass) and is copied, never mutated in place.
    """

    axes: list[GridAxis]
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        shape = tuple(ax.count for ax in self.axes)
        if values.shape != shape:
            raise GridError(
                f"values shape {values.shape} does not match axes {shape}")
        if not np.all(np.isfinite(values)):
            raise GridError("values contain NaN or Inf")
        self.values = values

    def axis_index(self, name: str) -> int:
        for i, ax in enumerate(self.axes):
            if ax.name == name:
                return i
        raise GridError(f"no axis named {name!r}")

    def axis(self, name: str) -> GridAxis:
        return self.axes[self.axis_index(name)]

    def with_values(self, values: np.ndarray, **meta) -> "SampledFunction":
        md = dict(self.metadata)
        md.update(meta)
        return SampledFunction(list(self.axes), values, md)

    def mesh(self) -> list[np.ndarray]:
        """Coordinate arrays broadcast to the full tensor shape."""
        return list(np.meshgrid(*[ax.nodes for ax in self.axes], indexing="ij"))

    def __add__(self, other: "SampledFunction") -> "SampledFunction":
        _check_same_axes(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "SampledFunction") -> "SampledFunction":
        _check_same_axes(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar: complex) -> "SampledFunction":
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__


def _check_same_axes(f: SampledFunction, g: SampledFunction):
    if len(f.axes) != len(g.axes):
        raise GridError("operands live on different grids")
    for a, b in zip(f.axes, g.axes):
        if a.count != b.count or not np.allclose(a.nodes, b.nodes):
            raise GridError(f"axis {a.name!r} differs between operands")


def integrate(f: SampledFunction) -> complex:
    """Quadrature sum of f against the product of axis weights.

    Angle / euler-beta / frequency axes contribute their measure
    normalizers, so compact factors are Haar mass 1 and spectral axes
    integrate d(xi)/(2pi).
    """
    acc = f.values
    norm = 1.0
    for ax in reversed(f.axes):
        acc = np.tensordot(acc, ax.weights, axes=([acc.ndim - 1], [0]))
        norm *= ax.measure_normalizer
    return complex(acc * norm)


def norm_squared(f: SampledFunction) -> float:
    """L2 norm squared: integrate(|f|^2), returned as a real number."""
    g = f.with_values(np.abs(f.values) ** 2)
    return float(integrate(g).real)


def dft_axis(f: SampledFunction, axis: str, sign: int,
             dual_name: str | None = None) -> SampledFunction:
    """Replace one linear/log/frequency axis by its Fourier dual.

    sign -1: kernel e^{-i xi x} against the axis quadrature weights
    (forward).  sign +1: kernel e^{+i xi x}; on a frequency axis this is
    the inverse transform (weights d(xi)/(2pi)) back onto the source grid.
    """
    if sign not in (-1, +1):
        raise GridError("sign must be -1 or +1")
    idx = f.axis_index(axis)
    ax = f.axes[idx]
    if ax.kind in ("angle", "euler-beta"):
        raise GridError(
            f"axis {axis!r} is compact; use the Peter-Weyl transform instead")
    if ax.kind == "frequency":
        out_ax = ax.source if ax.source is not None else frequency_axis_for(ax)
        if ax.source is None and dual_name:
            out_ax = out_ax.rename(dual_name)
    else:
        out_ax = frequency_axis_for(ax, name=dual_name)
    kernel = np.exp(1j * sign * np.outer(out_ax.nodes, ax.nodes))
    kernel *= ax.weights * ax.measure_normalizer
    values = np.tensordot(f.values, kernel, axes=([idx], [1]))
    values = np.moveaxis(values, -1, idx)
    axes = list(f.axes)
    axes[idx] = out_ax
    return SampledFunction(axes, values, dict(f.metadata))


@dataclass(frozen=True)
class TestFunctionSpec:
    """Closed-form test function, samplable on a grid axis by axis.

    kinds:
      * ``gaussian``: prod exp(-(x-c)^2 / (2 w^2)) with per-axis center/width.
      * ``bump``: compactly supported prod exp(1 - 1/(1-u^2)), u=(x-c)/w.
      * ``delta-approx``: gaussian normalized to unit integral.
      * ``trig-polynomial``: sum_k c_k e^{i k theta} on one angle axis;
        coefficients maps integer k -> complex.
      * ``wigner-polynomial``: sum c[(l,m,n)] D^l_{mn} on SO(3) Euler axes.
    """

    __test__ = False  # keep pytest from collecting this as a test class

    kind: str
    center: tuple = ()
    width: tuple = ()
    coefficients: dict = field(default_factory=dict)

    def profile(self, i: int, x: np.ndarray) -> np.ndarray:
        """Closed-form factor along axis i, for separable kinds."""
        c = self.center[i] if i < len(self.center) else 0.0
        w = self.width[i] if i < len(self.width) else 1.0
        u = (np.asarray(x, dtype=float) - c) / w
        if self.kind == "gaussian":
            return np.exp(-0.5 * u * u)
        if self.kind == "delta-approx":
            return np.exp(-0.5 * u * u) / (w * np.sqrt(TWO_PI))
        if self.kind == "bump":
            out = np.zeros_like(u)
            inside = np.abs(u) < 1.0
            ui = u[inside]
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - ui * ui))
            return out
        raise GridError(f"kind {self.kind!r} has no per-axis profile")

    def __call__(self, *coords: np.ndarray) -> np.ndarray:
        """Evaluate at broadcastable coordinate arrays, one per axis."""
        if self.kind in ("gaussian", "bump", "delta-approx"):
            coords = np.broadcast_arrays(*[np.asarray(c, float) for c in coords])
            out = np.ones(coords[0].shape, dtype=complex)
            for i, x in enumerate(coords):
                out *= self.profile(i, x)
            return out
        if self.kind == "trig-polynomial":
            (theta,) = coords
            theta = np.asarray(theta, dtype=float)
            out = np.zeros(theta.shape, dtype=complex)
            for k, c in self.coefficients.items():
                out += c * np.exp(1j * int(k) * theta)
            return out
        if self.kind == "wigner-polynomial":
            from . import rotations
            alpha, beta, gamma = np.broadcast_arrays(
                *[np.asarray(c, float) for c in coords])
            out = np.zeros(alpha.shape, dtype=complex)
            for (l, m, n), c in self.coefficients.items():
                out += c * rotations.wigner_entry(l, m, n, alpha, beta, gamma)
            return out
        raise GridError(f"unknown test function kind {self.kind!r}")


def make_test_function(spec: TestFunctionSpec, axes: Sequence[GridAxis],
                       strict: bool = False) -> SampledFunction:
    """Sample a closed-form test function on a tensor grid.

    The spec is recorded in metadata for report provenance; decaying kinds
    are checked against DECAY_TOLERANCE at the grid boundary (warning flag,
    or a hard error in strict mode).
    """
    axes = list(axes)
    grids = np.meshgrid(*[ax.nodes for ax in axes], indexing="ij")
    values = spec(*grids)
    values = np.broadcast_to(values, tuple(ax.count for ax in axes)).astype(complex)
    meta = {"spec": spec, "warnings": []}
    if spec.kind in ("gaussian", "bump", "delta-approx"):
        worst = _boundary_max(values, axes)
        if worst > DECAY_TOLERANCE:
            msg = (f"boundary decay {worst:.3e} exceeds {DECAY_TOLERANCE:.0e}")
            if strict:
                raise GridError(msg)
            meta["warnings"].append(msg)
    return SampledFunction(axes, values, meta)


def _boundary_max(values: np.ndarray, axes: Sequence[GridAxis]) -> float:
    worst = 0.0
    for i, ax in enumerate(axes):
        if ax.kind in ("angle", "euler-beta"):
            continue
        sl = [slice(None)] * values.ndim
        for edge in (0, -1):
            sl[i] = edge
            worst = max(worst, float(np.max(np.abs(values[tuple(sl)]))))
    return worst


def to_csv(f: SampledFunction, path: str):
    """Write node coordinates plus re/im columns, one grid point per row."""
    grids = f.mesh()
    cols = [g.ravel() for g in grids]
    cols.append(f.values.real.ravel())
    cols.append(f.values.imag.ravel())
    header = ",".join([ax.name for ax in f.axes] + ["re", "im"])
    np.savetxt(path, np.column_stack(cols), delimiter=",", header=header,
               comments="")
