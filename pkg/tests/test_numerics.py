import numpy as np
import pytest

from common.errors import InputError, QuadratureError, SolverError
from numerics import (
    Grid1D,
    GriddedFn,
    Tikhonov,
    TruncatedSVD,
    build_inverse,
    gaussian_cdf,
    gaussian_pdf,
    hermite_quadrature,
    integrate_until_converged,
    legendre_quadrature,
    parse_strategy,
    partial_derivative,
    regularized_solve,
)


# ---------------------------------------------------------------- gaussian

def test_gaussian_values():
    assert gaussian_pdf(0.0) == pytest.approx(0.3989422804014327, abs=1e-15)
    assert gaussian_cdf(0.0) == 0.5
    assert gaussian_cdf(1.96) == pytest.approx(0.9750021048517795, abs=1e-12)
    assert gaussian_cdf(-40.0) == pytest.approx(0.0, abs=1e-300)


def test_gaussian_keeps_array_shape():
    out = gaussian_pdf(np.zeros((2, 3)))
    assert out.shape == (2, 3)


@pytest.mark.parametrize("bad", [np.nan, np.inf, [0.0, -np.inf]])
def test_gaussian_rejects_non_finite(bad):
    with pytest.raises(InputError):
        gaussian_cdf(bad)
    with pytest.raises(InputError):
        gaussian_pdf(bad)


# ---------------------------------------------------------------- quadrature

def test_hermite_moments():
    nodes, weights = hermite_quadrature(2)
    assert np.sum(weights * nodes ** 2) == pytest.approx(1.0, abs=1e-12)
    nodes, weights = hermite_quadrature(10)
    assert np.sum(weights * nodes ** 4) == pytest.approx(3.0, abs=1e-10)
    nodes, weights = hermite_quadrature(5)
    assert np.sum(weights * nodes ** 8) == pytest.approx(105.0, rel=1e-10)


def test_hermite_symmetric_cdf_integral():
    nodes, weights = hermite_quadrature(20)
    assert np.sum(weights * gaussian_cdf(nodes)) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("order", [2, 3, 7, 40, 64])
def test_hermite_weights_sum_to_one(order):
    nodes, weights = hermite_quadrature(order)
    assert np.all(weights > 0)
    assert weights.sum() == pytest.approx(1.0, abs=1e-12)


def test_hermite_order_too_small():
    with pytest.raises(InputError):
        hermite_quadrature(1)


def test_legendre_polynomial():
    nodes, weights = legendre_quadrature(4, 0.0, 1.0)
    assert np.sum(weights * nodes ** 2) == pytest.approx(1.0 / 3.0, abs=1e-14)


def test_integrate_until_converged_stops_on_agreement():
    values, order = integrate_until_converged(lambda order: np.array([1.0, 2.0]), initial_order=8)
    assert order == 16
    np.testing.assert_array_equal(values, [1.0, 2.0])


def test_integrate_until_converged_gives_up_at_cap():
    with pytest.raises(QuadratureError):
        integrate_until_converged(lambda order: np.array([float(order)]), initial_order=8, max_order=64)


# ---------------------------------------------------------------- grids and derivatives

def test_grid_validation():
    with pytest.raises(ValueError):
        Grid1D(lo=1.0, hi=1.0, n=5)
    with pytest.raises(ValueError):
        Grid1D(lo=0.0, hi=1.0, n=2)
    assert Grid1D(lo=0.0, hi=1.0, n=5).spacing == 0.25


def test_derivative_of_quadratic():
    grid = Grid1D(lo=-1.0, hi=1.0, n=21)
    f = GriddedFn((grid,), grid.nodes ** 2)
    np.testing.assert_allclose(partial_derivative(f, order=1).values, 2.0 * grid.nodes, atol=1e-12)
    np.testing.assert_allclose(partial_derivative(f, order=2).values, 2.0, atol=1e-9)


def test_derivative_of_sine_is_second_order_accurate():
    grid = Grid1D(lo=-1.0, hi=1.0, n=41)
    f = GriddedFn((grid,), np.sin(grid.nodes))
    assert np.max(np.abs(partial_derivative(f).values - np.cos(grid.nodes))) < 1e-3
    assert np.max(np.abs(partial_derivative(f, order=2).values + np.sin(grid.nodes))) < 1e-2


def test_derivative_along_second_axis():
    g1, g2 = Grid1D(lo=0.0, hi=1.0, n=6), Grid1D(lo=-1.0, hi=2.0, n=7)
    z1, z2 = np.meshgrid(g1.nodes, g2.nodes, indexing="ij")
    f = GriddedFn((g1, g2), z1 * z2 ** 2)
    np.testing.assert_allclose(partial_derivative(f, axis=1).values, 2.0 * z1 * z2, atol=1e-10)


def test_derivative_is_linear():
    grid = Grid1D(lo=0.0, hi=2.0, n=17)
    f = GriddedFn((grid,), np.exp(grid.nodes))
    g = GriddedFn((grid,), np.cos(grid.nodes))
    combined = partial_derivative(f.scaled(2.0) + g.scaled(-3.0), order=2).values
    separate = 2.0 * partial_derivative(f, order=2).values - 3.0 * partial_derivative(g, order=2).values
    np.testing.assert_allclose(combined, separate, atol=1e-9)


def test_derivative_needs_five_nodes():
    grid = Grid1D(lo=0.0, hi=1.0, n=4)
    with pytest.raises(InputError):
        partial_derivative(GriddedFn((grid,), np.zeros(4)))


def test_derivative_rejects_third_order():
    grid = Grid1D(lo=0.0, hi=1.0, n=9)
    with pytest.raises(InputError):
        partial_derivative(GriddedFn((grid,), np.zeros(9)), order=3)


# ---------------------------------------------------------------- regularization

def test_identity_solve_is_exact():
    x = regularized_solve(np.eye(3), np.array([1.0, 2.0, 3.0]), Tikhonov(lam=0.0))
    np.testing.assert_allclose(x, [1.0, 2.0, 3.0], atol=1e-12)


def test_ridge_suppresses_small_singular_direction():
    kernel = np.diag([1.0, 1e-8])
    x = regularized_solve(kernel, np.array([1.0, 1e-8]), Tikhonov(lam=1e-6))
    assert x[0] == pytest.approx(1.0, abs=1e-5)
    assert abs(x[1]) < 1e-9


def test_full_rank_truncation_matches_solve():
    rng = np.random.default_rng(3)
    kernel = rng.normal(size=(4, 4)) + 4.0 * np.eye(4)
    rhs = rng.normal(size=4)
    x = regularized_solve(kernel, rhs, TruncatedSVD(rank=4))
    np.testing.assert_allclose(x, np.linalg.solve(kernel, rhs), atol=1e-10)


def test_ridge_norm_shrinks_with_lambda():
    rng = np.random.default_rng(7)
    kernel = rng.normal(size=(20, 10))
    rhs = rng.normal(size=20)
    norms = [np.linalg.norm(regularized_solve(kernel, rhs, Tikhonov(lam=lam))) for lam in (0.0, 1e-3, 1e-1, 1.0, 10.0)]
    assert all(a >= b - 1e-12 for a, b in zip(norms, norms[1:]))


def test_solve_input_errors():
    with pytest.raises(InputError):
        regularized_solve(np.eye(3), np.ones(2), Tikhonov(lam=0.0))
    with pytest.raises(SolverError):
        regularized_solve(np.zeros((3, 3)), np.ones(3), TruncatedSVD())
    with pytest.raises(InputError):
        regularized_solve(np.ones((3, 3)), np.ones(3), TruncatedSVD(rank=2))


def test_smoothing_inverse_reproduces_constants():
    rng = np.random.default_rng(11)
    kernel = rng.random((30, 20))
    kernel /= kernel.sum(axis=1, keepdims=True)
    inverse = build_inverse(kernel, TruncatedSVD(), smoothing=True)
    np.testing.assert_allclose(inverse.apply(np.full(30, 0.3)), 0.3, atol=1e-8)


def test_parse_strategy():
    assert parse_strategy("tsvd:1e-4") == TruncatedSVD(threshold=1e-4)
    assert parse_strategy("tsvd") == TruncatedSVD()
    assert parse_strategy("tikhonov:0.01") == Tikhonov(lam=0.01)
    for bad in ("bogus:1", "tikhonov:abc", "tikhonov:"):
        with pytest.raises(InputError):
            parse_strategy(bad)
