"""Grid construction, quadrature, per-axis DFT and test-function sampling."""

import numpy as np
import pytest

from glfourier.grids import (GridAxis, GridError, SampledFunction,
                             TestFunctionSpec, build_grid, dft_axis,
                             frequency_axis_for, integrate, linear_axis,
                             angle_axis, euler_beta_axis, log_axis,
                             make_test_function, norm_squared)

SQRT_PI = 1.7724538509055159  # closed-form integral of exp(-x^2)


def gauss_legendre_2pt_oracle():
    # 2-point rule on [-1,1], derived from exactness on 1, x, x^2, x^3:
    # symmetric nodes +-c with weights 1 each; x^2 exactness gives c^2 = 1/3.
    c = 1.0 / np.sqrt(3.0)
    return np.array([-c, c]), np.array([1.0, 1.0])


def test_build_grid_angle_four_nodes():
    (ax,) = build_grid([{"name": "theta", "kind": "angle", "count": 4}])
    np.testing.assert_allclose(ax.nodes, [0, np.pi / 2, np.pi, 3 * np.pi / 2])
    np.testing.assert_allclose(ax.weights, np.pi / 2)
    assert abs(ax.weights.sum() - 2 * np.pi) < 1e-15


def test_build_grid_trapezoid_two_points():
    (ax,) = build_grid([{"name": "x", "kind": "linear-real",
                         "lo": -1.0, "hi": 1.0, "count": 2}])
    np.testing.assert_allclose(ax.weights, [1.0, 1.0])


def test_build_grid_euler_beta_matches_gauss_legendre():
    (ax,) = build_grid([{"name": "beta", "kind": "euler-beta", "count": 2}])
    nodes_c, w = gauss_legendre_2pt_oracle()
    np.testing.assert_allclose(np.sort(np.cos(ax.nodes)), np.sort(nodes_c),
                               atol=1e-15)
    np.testing.assert_allclose(ax.weights, w, atol=1e-15)
    assert abs(ax.weights.sum() - 2.0) < 1e-14


@pytest.mark.parametrize("spec, message", [
    ({"name": "x", "kind": "linear-real", "lo": 0, "hi": 1, "count": 1}, "x"),
    ({"name": "y", "kind": "linear-real", "lo": 2, "hi": 2, "count": 8}, "y"),
    ({"name": "z", "kind": "nope", "count": 4}, "z"),
])
def test_build_grid_rejects_bad_specs(spec, message):
    with pytest.raises(GridError, match=message):
        build_grid([spec])


def test_integrate_constant_on_angle_axis_is_one():
    ax = angle_axis("theta", 16)
    f = SampledFunction([ax], np.ones(16))
    assert abs(integrate(f) - 1.0) < 1e-14


def test_integrate_gaussian_matches_closed_form():
    ax = linear_axis("x", -8.0, 8.0, 512)
    f = SampledFunction([ax], np.exp(-ax.nodes**2))
    assert abs(integrate(f).real - SQRT_PI) < 1e-10


def test_integrate_zero():
    ax = linear_axis("x", -1.0, 1.0, 16)
    f = SampledFunction([ax], np.zeros(16))
    assert integrate(f) == 0.0


def test_integrate_is_linear():
    rng = np.random.default_rng(7)
    ax = linear_axis("x", -2.0, 2.0, 33)
    f = SampledFunction([ax], rng.normal(size=33) + 1j * rng.normal(size=33))
    g = SampledFunction([ax], rng.normal(size=33) + 1j * rng.normal(size=33))
    a, b = 1.7 - 0.3j, -2.2 + 0.9j
    combo = f.with_values(a * f.values + b * g.values)
    assert abs(integrate(combo) - (a * integrate(f) + b * integrate(g))) < 1e-13


def test_dft_delta_approx_is_flat():
    ax = linear_axis("x", -8.0, 8.0, 257)
    spec = TestFunctionSpec("delta-approx", center=(0.0,), width=(0.25,))
    f = make_test_function(spec, [ax])
    F = dft_axis(f, "x", -1)
    xi = F.axes[0].nodes
    window = np.abs(xi) < 2.0
    np.testing.assert_allclose(F.values[window], 1.0, atol=0.15)
    assert abs(F.values[np.argmin(np.abs(xi))] - 1.0) < 1e-10


def test_dft_gaussian_self_transform():
    ax = linear_axis("x", -10.0, 10.0, 512)
    f = SampledFunction([ax], np.exp(-ax.nodes**2 / 2))
    F = dft_axis(f, "x", -1)
    xi = F.axes[0].nodes
    expected = np.sqrt(2 * np.pi) * np.exp(-xi**2 / 2)
    keep = expected > 1e-6      # relative error where the transform is alive
    rel = np.abs(F.values[keep] - expected[keep]) / expected[keep]
    assert rel.max() < 1e-8


def test_dft_pure_tone_peaks_at_three():
    ax = linear_axis("x", -16.0, 16.0, 256)
    # embed the tone frequency in the dual grid so the peak is exact
    dual = frequency_axis_for(ax)
    k = np.argmin(np.abs(dual.nodes - 3.0))
    tone = np.exp(1j * dual.nodes[k] * ax.nodes)
    F = dft_axis(SampledFunction([ax], tone), "x", -1)
    assert np.argmax(np.abs(F.values)) == k


def test_dft_round_trip_is_identity():
    ax = linear_axis("x", -10.0, 10.0, 256)
    f = SampledFunction([ax], np.exp(-ax.nodes**2 / 2) * np.cos(2 * ax.nodes))
    back = dft_axis(dft_axis(f, "x", -1), "freq_x", +1)
    assert back.axes[0].name == "x"
    rel = np.abs(back.values - f.values).max() / np.abs(f.values).max()
    assert rel < 1e-8


def test_dft_rejects_angle_axis():
    ax = angle_axis("theta", 8)
    f = SampledFunction([ax], np.ones(8))
    with pytest.raises(GridError, match="Peter-Weyl"):
        dft_axis(f, "theta", -1)


def test_dft_rejects_unknown_axis():
    ax = linear_axis("x", -1.0, 1.0, 8)
    f = SampledFunction([ax], np.ones(8))
    with pytest.raises(GridError, match="no axis"):
        dft_axis(f, "y", -1)


def test_parseval_per_axis():
    ax = linear_axis("x", -10.0, 10.0, 300)
    f = SampledFunction([ax], np.exp(-ax.nodes**2 / 2) * (1 + 0.5j * ax.nodes))
    F = dft_axis(f, "x", -1)
    lhs = norm_squared(f)
    rhs = norm_squared(F)
    assert abs(lhs - rhs) / lhs < 1e-8


def test_make_gaussian_values():
    ax = linear_axis("x", -8.0, 8.0, 65)
    f = make_test_function(TestFunctionSpec("gaussian", (0.0,), (1.0,)), [ax])
    np.testing.assert_allclose(f.values, np.exp(-ax.nodes**2 / 2), atol=1e-15)
    assert f.metadata["warnings"] == []


def test_make_trig_polynomial_cosine():
    ax = angle_axis("theta", 32)
    spec = TestFunctionSpec("trig-polynomial",
                            coefficients={1: 0.5, -1: 0.5})
    f = make_test_function(spec, [ax])
    np.testing.assert_allclose(f.values, np.cos(ax.nodes), atol=1e-14)


@pytest.mark.parametrize("width", [0.5, 0.25, 0.125])
def test_delta_approx_has_unit_mass(width):
    ax = linear_axis("x", -8.0, 8.0, 513)
    f = make_test_function(
        TestFunctionSpec("delta-approx", (0.0,), (width,)), [ax])
    # oracle: the same quadrature on a 4x refined grid
    fine = linear_axis("x", -8.0, 8.0, 2049)
    oracle = make_test_function(
        TestFunctionSpec("delta-approx", (0.0,), (width,)), [fine])
    assert abs(integrate(f) - 1.0) < 1e-10
    assert abs(integrate(f) - integrate(oracle)) < 1e-10


def test_decay_violation_flags_and_strict_mode():
    ax = linear_axis("x", -2.0, 2.0, 33)   # gaussian tail 0.13 at the edge
    spec = TestFunctionSpec("gaussian", (0.0,), (1.0,))
    f = make_test_function(spec, [ax])
    assert f.metadata["warnings"]
    with pytest.raises(GridError, match="decay"):
        make_test_function(spec, [ax], strict=True)


def test_bump_is_compactly_supported():
    ax = linear_axis("x", -2.0, 2.0, 129)
    f = make_test_function(TestFunctionSpec("bump", (0.0,), (1.5,)), [ax])
    assert f.values[0] == 0.0 and f.values[-1] == 0.0
    assert f.metadata["warnings"] == []
    assert abs(f.values[64] - 1.0) < 1e-15   # center value e^{1-1} = 1


def test_log_axis_integrates_invariant_measure():
    # integral of 1 over t in [1, e] with dt/t equals 1
    ax = log_axis("u", -4.0, 4.0, 257)
    vals = ((ax.nodes >= 0) & (ax.nodes <= 1)).astype(float)
    vals[np.isclose(ax.nodes, 0.0)] = 0.5
    vals[np.isclose(ax.nodes, 1.0)] = 0.5
    f = SampledFunction([ax], vals)
    assert abs(integrate(f).real - 1.0) < 1e-12


def test_sampled_function_shape_and_finite_guards():
    ax = linear_axis("x", 0.0, 1.0, 4)
    with pytest.raises(GridError, match="shape"):
        SampledFunction([ax], np.ones(5))
    with pytest.raises(GridError, match="NaN"):
        SampledFunction([ax], np.array([1.0, np.nan, 0.0, 0.0]))


def test_csv_round_trip(tmp_path):
    from glfourier.grids import to_csv
    ax = linear_axis("x", -1.0, 1.0, 5)
    ay = angle_axis("theta", 4)
    f = SampledFunction([ax, ay], np.outer(ax.nodes, np.cos(ay.nodes)) + 0.5j)
    path = tmp_path / "f.csv"
    to_csv(f, str(path))
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert data.shape == (20, 4)
    np.testing.assert_allclose(data[:, 2] + 1j * data[:, 3],
                               f.values.ravel(), atol=1e-12)
