"""The semidirect product AN: action, laws, extension, convolutions, Fourier."""

import numpy as np
import pytest

from glfourier.grids import (SampledFunction, TestFunctionSpec, dft_axis,
                             linear_axis, make_test_function, norm_squared)
from glfourier.solvable import (APoint, HPoint, SPoint, extend_invariant,
                                extension_evaluator, h_compose, h_inverse,
                                lemma41_spectral_check, rho_action,
                                rho_jacobian, s_compose, s_convolve, s_embed,
                                s_fourier, s_inverse)
from glfourier.unipotent import NCoordinates, coord_dim, interpolator

# standard n=2 lemma/extension grids: wide x box keeps the extension's
# flattening ridge below the narrow A profile's tail (calibrated)
BX, NX = 16.0, 193
BA, NA = 1.2, 25
BB, NB = 3.2, 65
WX, WA = 1.0, 0.2


def std_axes():
    return (linear_axis("x12", -BX, BX, NX),
            linear_axis("a1", -BA, BA, NA),
            linear_axis("a1", -BB, BB, NB))


def conjugation_oracle(t, x):
    """Independent rho oracle for n = 2: conjugate the 2x2 matrices."""
    a = np.diag([np.exp(t), np.exp(-t)])
    nmat = np.array([[1.0, x], [0.0, 1.0]])
    return (a @ nmat @ np.linalg.inv(a))[0, 1]


def test_rho_identity_fixes_everything():
    x = NCoordinates(3, [0.4, -1.0, 2.0])
    out = rho_action(APoint.identity(3), x)
    np.testing.assert_array_equal(out.coords, x.coords)


def test_rho_matches_matrix_conjugation():
    a = APoint(2, [np.log(2.0)])
    out = rho_action(a, NCoordinates(2, [1.0]))
    assert abs(out.coords[0] - 4.0) < 1e-14
    assert abs(out.coords[0] - conjugation_oracle(np.log(2.0), 1.0)) < 1e-14


def test_rho_jacobian_matches_numerical_derivative():
    t = np.array([np.log(2.0)])
    jac = rho_jacobian(2, t)
    assert abs(jac - 4.0) < 1e-13
    # finite-difference oracle for the 1-d volume scaling
    eps = 1e-6
    num = (conjugation_oracle(t[0], 1.0 + eps)
           - conjugation_oracle(t[0], 1.0 - eps)) / (2 * eps)
    assert abs(jac - num) < 1e-7


def test_rho_is_a_group_action():
    rng = np.random.default_rng(2)
    for n in (2, 3):
        for _ in range(50):
            a = APoint(n, rng.uniform(-1, 1, n - 1))
            b = APoint(n, rng.uniform(-1, 1, n - 1))
            x = NCoordinates(n, rng.uniform(-2, 2, coord_dim(n)))
            lhs = rho_action(a.compose(b), x).coords
            rhs = rho_action(a, rho_action(b, x)).coords
            np.testing.assert_allclose(lhs, rhs, rtol=1e-14, atol=1e-15)


def test_s_compose_identity_and_example():
    e = SPoint(NCoordinates.identity(2), APoint.identity(2))
    p = SPoint(NCoordinates(2, [1.0]), APoint(2, [0.3]))
    out = s_compose(e, p)
    np.testing.assert_allclose(out.x.coords, p.x.coords, atol=0)
    np.testing.assert_allclose(out.a.t, p.a.t, atol=0)
    # (x=1, t=log 2) (m=1, s=0) -> x = 1 + 4*1 = 5 (2x2 matrix oracle)
    lhs = s_compose(SPoint(NCoordinates(2, [1.0]), APoint(2, [np.log(2.0)])),
                    SPoint(NCoordinates(2, [1.0]), APoint.identity(2)))
    assert abs(lhs.x.coords[0] - 5.0) < 1e-14
    m1 = np.array([[1.0, 1.0], [0.0, 1.0]]) @ np.diag([2.0, 0.5])
    m2 = np.array([[1.0, 1.0], [0.0, 1.0]]) @ np.eye(2)
    prod = m1 @ m2
    a_part = np.diag([prod[0, 0], prod[1, 1]])
    n_part = prod @ np.linalg.inv(a_part)
    assert abs(n_part[0, 1] / prod[1, 1] * prod[1, 1] - 5.0 * 0.5 / 0.5) < 1e-12
    assert abs(prod[0, 1] / prod[1, 1] - 5.0) < 1e-12


def test_s_inverse_composes_to_identity():
    rng = np.random.default_rng(3)
    for n in (2, 3):
        for _ in range(100):
            p = SPoint(NCoordinates(n, rng.uniform(-2, 2, coord_dim(n))),
                       APoint(n, rng.uniform(-1, 1, n - 1)))
            out = s_compose(p, s_inverse(p))
            np.testing.assert_allclose(out.x.coords, 0.0, atol=1e-14)
            np.testing.assert_allclose(out.a.t, 0.0, atol=1e-14)


@pytest.mark.parametrize("n", [2, 3])
def test_s_and_h_group_axioms(n):
    rng = np.random.default_rng(40 + n)
    for _ in range(200):
        ps = [SPoint(NCoordinates(n, rng.uniform(-1.5, 1.5, coord_dim(n))),
                     APoint(n, rng.uniform(-1, 1, n - 1))) for _ in range(3)]
        lhs = s_compose(s_compose(ps[0], ps[1]), ps[2])
        rhs = s_compose(ps[0], s_compose(ps[1], ps[2]))
        np.testing.assert_allclose(lhs.x.coords, rhs.x.coords, atol=1e-13)
        np.testing.assert_allclose(lhs.a.t, rhs.a.t, atol=1e-14)
        hs = [HPoint(NCoordinates(n, rng.uniform(-1.5, 1.5, coord_dim(n))),
                     APoint(n, rng.uniform(-1, 1, n - 1)),
                     APoint(n, rng.uniform(-1, 1, n - 1))) for _ in range(3)]
        hl = h_compose(h_compose(hs[0], hs[1]), hs[2])
        hr = h_compose(hs[0], h_compose(hs[1], hs[2]))
        np.testing.assert_allclose(hl.x.coords, hr.x.coords, atol=1e-13)
        np.testing.assert_allclose(hl.a.t, hr.a.t, atol=1e-14)
        np.testing.assert_allclose(hl.b.t, hr.b.t, atol=1e-14)
        inv = h_compose(hs[0], h_inverse(hs[0]))
        np.testing.assert_allclose(inv.x.coords, 0.0, atol=1e-13)


def test_s_embeds_in_h_compatibly():
    rng = np.random.default_rng(11)
    for _ in range(100):
        p = SPoint(NCoordinates(2, rng.uniform(-2, 2, 1)),
                   APoint(2, rng.uniform(-1, 1, 1)))
        q = SPoint(NCoordinates(2, rng.uniform(-2, 2, 1)),
                   APoint(2, rng.uniform(-1, 1, 1)))
        direct = s_embed(s_compose(p, q))
        via_h = h_compose(s_embed(p), s_embed(q))
        np.testing.assert_allclose(direct.x.coords, via_h.x.coords, atol=1e-14)
        np.testing.assert_allclose(direct.b.t, via_h.b.t, atol=1e-14)
        assert np.all(via_h.a.t == 0.0)


def test_extension_restricts_to_f_on_the_zero_slice():
    axx, axa, axb = std_axes()
    f = make_test_function(TestFunctionSpec("gaussian", (0.0, 0.0), (WX, WA)),
                           [axx, axb])
    ext = extend_invariant(f, 2, [axa])
    mid = NA // 2   # a = 0 node
    np.testing.assert_allclose(ext.values[:, mid, :], f.values, atol=1e-13)


def test_extension_invariance_two_sided():
    axx, axa, axb = std_axes()
    f = make_test_function(TestFunctionSpec("gaussian", (0.0, 0.0), (WX, WA)),
                           [axx, axb])
    ext = extend_invariant(f, 2, [axa])
    interp = interpolator(ext)
    rng = np.random.default_rng(7)
    pts = np.column_stack([rng.uniform(-2, 2, 100), rng.uniform(-0.5, 0.5, 100),
                           rng.uniform(-1, 1, 100)])
    s = rng.uniform(-0.4, 0.4, 100)
    moved = np.column_stack([np.exp(2 * s) * pts[:, 0], pts[:, 1] - s,
                             pts[:, 2] + s])
    resid = np.abs(interp(moved) - interp(pts))
    # multilinear interpolation floor: h^2/8 * |d2 psi| ~ 3e-2 at h = 0.1
    # (measured max 1.2e-2 for this seed)
    assert resid.max() < 3e-2


def test_extension_tracks_the_sheared_support():
    axx, axa, axb = std_axes()
    x0, u0 = 2.0, 0.4
    f = make_test_function(TestFunctionSpec("delta-approx", (x0, u0), (0.4, 0.1)),
                           [axx, axb])
    ext = extend_invariant(f, 2, [axa])
    for ia in (4, NA // 2, NA - 5):
        a = axa.nodes[ia]
        sl = np.abs(ext.values[:, ia, :])
        ix, ib = np.unravel_index(np.argmax(sl), sl.shape)
        assert abs(axx.nodes[ix] - x0 * np.exp(-2 * a)) <= 2.5 * (
            axx.nodes[1] - axx.nodes[0])
        assert abs(axb.nodes[ib] - (u0 - a)) <= 2.5 * (axb.nodes[1] - axb.nodes[0])


def test_convolve_with_delta_recovers_f_both_modes():
    axx = linear_axis("x12", -8.0, 8.0, 129)
    axa = linear_axis("a1", -2.0, 2.0, 33)
    f = make_test_function(TestFunctionSpec("gaussian", (0.0, 0.0), (1.0, 0.5)),
                           [axx, axa])
    delta = np.zeros((129, 33))
    delta[64, 16] = 1.0 / (axx.weights[64] * axa.weights[16])
    g = SampledFunction([axx, axa], delta)
    for mode in ("group", "commutative"):
        conv = s_convolve(f, g, 2, mode=mode)
        assert np.abs(conv.values - f.values).max() < 1e-12


def test_lemma41_pointwise_dual_evaluation():
    # both convolution senses, evaluated through the closed form of the
    # extension, agree summand by summand
    axx = linear_axis("x12", -10.0, 10.0, 49)
    axa = linear_axis("a1", -1.2, 1.2, 25)
    axb = linear_axis("a1", -3.2, 3.2, 65)
    f = make_test_function(TestFunctionSpec("gaussian", (0.0, 0.0), (WX, WA)),
                           [axx, axb])
    g = make_test_function(TestFunctionSpec("gaussian", (0.3, 0.0), (WX, WA)),
                           [axx, axa])
    ext = extend_invariant(f, 2, [axa])
    ev = extension_evaluator(f, 2)
    cg = s_convolve(ext, g, 2, mode="group", evaluator=ev)
    cc = s_convolve(ext, g, 2, mode="commutative", evaluator=ev)
    sup = np.abs(cg.values - cc.values).max() / np.abs(cc.values).max()
    assert sup < 1e-4


def test_commutative_mode_is_plane_convolution():
    axx = linear_axis("x12", -6.0, 6.0, 49)
    axa = linear_axis("a1", -6.0, 6.0, 49)
    f = make_test_function(TestFunctionSpec("gaussian", (0.0, 0.3), (1.0, 0.8)),
                           [axx, axa])
    g = make_test_function(TestFunctionSpec("gaussian", (-0.2, 0.0), (0.9, 1.0)),
                           [axx, axa])
    conv = s_convolve(f, g, 2, mode="commutative")
    # oracle: direct Riemann double sum over the kernel grid
    xs, ts = np.meshgrid(axx.nodes, axa.nodes, indexing="ij")
    oracle = np.zeros_like(conv.values)
    wmesh = np.outer(axx.weights, axa.weights)
    fi = interpolator(f)
    for j in np.ndindex(g.values.shape):
        args = np.stack([xs - axx.nodes[j[0]], ts - axa.nodes[j[1]]], axis=-1)
        oracle += wmesh[j] * g.values[j] * fi(args.reshape(-1, 2)).reshape(xs.shape)
    assert np.abs(conv.values - oracle).max() < 1e-12


def test_s_fourier_separable_matches_1d_oracles():
    axx = linear_axis("x12", -10.0, 10.0, 128)
    axa = linear_axis("a1", -6.0, 6.0, 64)
    f = make_test_function(TestFunctionSpec("gaussian", (0.1, -0.2), (1.0, 0.7)),
                           [axx, axa])
    F = s_fourier(f, 2)
    fx = make_test_function(TestFunctionSpec("gaussian", (0.1,), (1.0,)), [axx])
    ft = make_test_function(TestFunctionSpec("gaussian", (-0.2,), (0.7,)), [axa])
    oracle = np.outer(dft_axis(fx, "x12", -1).values,
                      dft_axis(ft, "a1", -1).values)
    scale = np.abs(oracle).max()
    assert np.abs(F.values - oracle).max() / scale < 1e-8
    assert F.axes[0].name == "xi_x12" and F.axes[1].name == "lambda_a1"


def test_s_fourier_of_near_delta_is_flat():
    axx = linear_axis("x12", -8.0, 8.0, 257)
    axa = linear_axis("a1", -4.0, 4.0, 129)
    f = make_test_function(TestFunctionSpec("delta-approx", (0.0, 0.0),
                                            (0.15, 0.1)), [axx, axa])
    F = s_fourier(f, 2)
    xi = F.axes[0].nodes
    lam = F.axes[1].nodes
    window = np.ix_(np.abs(xi) < 1.0, np.abs(lam) < 1.0)
    np.testing.assert_allclose(F.values[window], 1.0, atol=0.03)


def test_s_fourier_pure_phase_peaks_at_the_right_node():
    axx = linear_axis("x12", -8.0, 8.0, 64)
    axa = linear_axis("a1", -8.0, 8.0, 64)
    f = make_test_function(TestFunctionSpec("gaussian", (0, 0), (10, 10)),
                           [axx, axa])
    F0 = s_fourier(f, 2)
    xi0 = F0.axes[0].nodes[40]
    lam0 = F0.axes[1].nodes[24]
    phase = np.exp(1j * (xi0 * axx.nodes[:, None] + lam0 * axa.nodes[None, :]))
    F = s_fourier(SampledFunction([axx, axa], phase), 2)
    peak = np.unravel_index(np.argmax(np.abs(F.values)), F.values.shape)
    assert peak == (40, 24)


def test_s_fourier_round_trip():
    axx = linear_axis("x12", -10.0, 10.0, 96)
    axa = linear_axis("a1", -6.0, 6.0, 64)
    f = make_test_function(TestFunctionSpec("gaussian", (0.0, 0.0), (1.0, 0.8)),
                           [axx, axa])
    back = s_fourier(s_fourier(f, 2, -1), 2, +1)
    assert np.abs(back.values - f.values).max() / np.abs(f.values).max() < 1e-8


def test_an_plancherel():
    axx = linear_axis("x12", -10.0, 10.0, 256)
    axa = linear_axis("a1", -6.0, 6.0, 128)
    f = make_test_function(TestFunctionSpec("gaussian", (0.2, 0.1), (1.0, 0.8)),
                           [axx, axa])
    lhs = norm_squared(f)
    rhs = norm_squared(s_fourier(f, 2))
    assert abs(lhs - rhs) / lhs < 1e-4
    assert abs(lhs - rhs) / lhs < 1e-10   # product transform is grid-exact


def test_lemma41_spectral_with_discrete_delta():
    axx, axa, axb = std_axes()
    f = make_test_function(TestFunctionSpec("gaussian", (0.0, 0.0), (WX, WA)),
                           [axx, axb])
    delta = np.zeros((NX, NA))
    delta[NX // 2, NA // 2] = 1.0 / (axx.weights[NX // 2] * axa.weights[NA // 2])
    g = SampledFunction([axx, axa], delta)
    report = lemma41_spectral_check(f, g, 2, [axa], mode="commutative")
    assert report["max_rel_deviation"] < 1e-12


@pytest.mark.parametrize("mode,tol", [("commutative", 1e-3), ("group", 1e-3)])
def test_lemma41_spectral_gaussian_pair(mode, tol):
    axx, axa, axb = std_axes()
    f = make_test_function(TestFunctionSpec("gaussian", (0.0, 0.0), (WX, WA)),
                           [axx, axb])
    g = make_test_function(TestFunctionSpec("gaussian", (0.3, 0.0), (WX, WA)),
                           [axx, axa])
    report = lemma41_spectral_check(f, g, 2, [axa], mode=mode)
    assert report["max_rel_deviation"] < tol


def test_lemma41_spectral_zero_function():
    axx, axa, axb = std_axes()
    f = SampledFunction([axx, axb], np.zeros((NX, NB)))
    g = SampledFunction([axx, axa], np.zeros((NX, NA)))
    report = lemma41_spectral_check(f, g, 2, [axa], mode="commutative")
    assert np.abs(report["lhs"]).max() == 0.0
    assert np.abs(report["rhs"]).max() == 0.0
