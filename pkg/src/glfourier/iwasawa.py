"""Matrix-level group structure for GL(n,R).

Three pieces live here:

* the Iwasawa factorization g = k a n of a unit-determinant matrix into a
  rotation, a positive unimodular diagonal and a unipotent upper-triangular
  factor (QR with the triangular diagonal forced positive);
* the splitting GL+ = SL x R+* by the determinant scale, extended to the
  negative component through the sign matrix I- = diag(-1, 1, ..., 1);
* the two candidate group laws on GL-: the published law I-.A.B, which
  fails associativity for n >= 2 (see :func:`associativity_witness`), and
  the transported law A.I-.B pulled back from GL+ through tau(X) = I- X,
  which satisfies all group axioms and is the default everywhere else in
  the package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DET_GUARD = 1e-12
SL_DET_TOLERANCE = 1e-9


class GroupError(ValueError):
    """Matrix outside the domain of the requested operation."""


def sign_matrix(n: int) -> np.ndarray:
    """I- = diag(-1, 1, ..., 1); involutive with determinant -1."""
    m = np.eye(n)
    m[0, 0] = -1.0
    return m


def _as_square(g) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise GroupError(f"expected a square matrix, got shape {g.shape}")
    return g


def check_invertible(g) -> np.ndarray:
    g = _as_square(g)
    if abs(np.linalg.det(g)) < DET_GUARD:
        raise GroupError("matrix is singular (|det| < 1e-12)")
    return g


@dataclass(frozen=True)
class IwasawaFactors:
    """g = k . a . n with k in SO(n), a positive diagonal of det 1, n unipotent."""

    k: np.ndarray
    a: np.ndarray
    n_part: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.k @ self.a @ self.n_part

    @property
    def log_a(self) -> np.ndarray:
        """Free log coordinates (t_1, ..., t_{n-1}) of the diagonal factor."""
        return np.log(np.diag(self.a))[:-1]


def iwasawa_decompose(g) -> IwasawaFactors:
    """Factor g in SL(n,R) as k a n via QR on columns.

    Deterministic: the triangular diagonal is forced positive, which pins
    k in SO(n) when det g = 1.
    """
    g = _as_square(g)
    det = np.linalg.det(g)
    if abs(det - 1.0) > SL_DET_TOLERANCE:
        raise GroupError(f"iwasawa_decompose needs det = 1, got det = {det!r}")
    q, r = np.linalg.qr(g)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    q = q * signs                 # column rescale
    r = signs[:, None] * r        # row rescale
    d = np.diag(r).copy()
    a = np.diag(d)
    n_part = r / d[:, None]
    n_part[np.tril_indices_from(n_part, -1)] = 0.0
    np.fill_diagonal(n_part, 1.0)
    return IwasawaFactors(q, a, n_part)


def iwasawa_nak(g) -> IwasawaFactors:
    """Factor g in SL(n,R) as n a k (fields hold n_part, a, k in that product order).

    Obtained from the kan factorization of g^{-1}:
    g^{-1} = k0 a0 n0  implies  g = n0^{-1} a0^{-1} k0^{-1}.
    """
    f = iwasawa_decompose(np.linalg.inv(_as_square(g)))
    n_inv = np.linalg.inv(f.n_part)
    n_inv[np.tril_indices_from(n_inv, -1)] = 0.0
    np.fill_diagonal(n_inv, 1.0)
    return IwasawaFactors(f.k.T, np.diag(1.0 / np.diag(f.a)), n_inv)


@dataclass(frozen=True)
class ScaleSplit:
    """g = t . s (sign +) or g = I- . t . s (sign -), det s = 1, t > 0."""

    s: np.ndarray
    t: float
    sign: int

    def reconstruct(self) -> np.ndarray:
        g = self.t * self.s
        if self.sign < 0:
            g = sign_matrix(g.shape[0]) @ g
        return g


def gl_split(g) -> ScaleSplit:
    """Split an invertible matrix into unit-determinant and scale parts."""
    g = check_invertible(g)
    n = g.shape[0]
    det = np.linalg.det(g)
    sign = 1 if det > 0 else -1
    t = abs(det) ** (1.0 / n)
    s = (g if sign > 0 else sign_matrix(n) @ g) / t
    return ScaleSplit(s, float(t), sign)


def _check_negative(a) -> np.ndarray:
    a = check_invertible(a)
    if np.linalg.det(a) >= 0:
        raise GroupError("expected a matrix with negative determinant")
    return a


def glminus_product(a, b, law: str = "transported") -> np.ndarray:
    """Multiply two negative-determinant matrices under the chosen GL- law.

    law="paper":       A * B = I- . A . B   (not associative for n >= 2)
    law="transported": A * B = A . I- . B   (group law; tau(X) = I-.X is an
                                             isomorphism onto GL+)
    """
    a = _check_negative(a)
    b = _check_negative(b)
    i_minus = sign_matrix(a.shape[0])
    if law == "paper":
        return i_minus @ a @ b
    if law == "transported":
        return a @ i_minus @ b
    raise GroupError(f"unknown GL- law {law!r}")


def glminus_inverse(a) -> np.ndarray:
    """Inverse for the transported law: A * inv(A) = inv(A) * A = I-.

    The published formula I-.A has positive determinant, hence does not
    even lie in GL-; the transported inverse is I- A^{-1} I-.
    """
    a = _check_negative(a)
    i_minus = sign_matrix(a.shape[0])
    return i_minus @ np.linalg.inv(a) @ i_minus


def tau(a) -> np.ndarray:
    """The bijection GL- -> GL+, tau(X) = I- X."""
    a = _as_square(a)
    return sign_matrix(a.shape[0]) @ a


def associativity_witness(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Fixed triple A = B = C violating associativity of the paper law for n >= 2.

    The swap of the first two coordinates has determinant -1 and does not
    commute with I-, which is exactly what the published proof overlooks.
    """
    if n < 2:
        raise GroupError("the witness needs n >= 2")
    p = np.eye(n)
    p[[0, 1]] = p[[1, 0]]
    return p, p.copy(), p.copy()


def random_sl(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random SL(n,R) matrix: normal entries, determinant-normalized."""
    while True:
        g = rng.standard_normal((n, n))
        det = np.linalg.det(g)
        if abs(det) > 1e-6:
            break
    g = g / abs(det) ** (1.0 / n)
    if det < 0:
        g[0] = -g[0]
    return g


def random_glminus(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random matrix with determinant < 0 and |det| bounded away from 0."""
    g = random_sl(n, rng) * (0.5 + rng.random())
    g[0] = -g[0]
    return g
