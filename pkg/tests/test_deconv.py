import numpy as np
import pytest

from common.errors import InputError, KernelMassError
from deconv import ChoiceKernel, build_kernel_matrix, close_kernel_rows, default_v_grid, recover_gamma, recover_h
from factories import binary_spec, point_mass_g
from model import CCPTable, IndexModel, ccp_exact
from numerics import Grid1D, Tikhonov, TruncatedSVD, gaussian_cdf

Z1 = Grid1D(lo=-1.0, hi=1.0, n=65)
WIDE = Grid1D(lo=-8.0, hi=8.0, n=321)


def test_kernel_rows_integrate_to_one():
    matrix = build_kernel_matrix(IndexModel.single(0.0, 1.0), "0", 1.0, Z1, WIDE)
    np.testing.assert_allclose(matrix.sum(axis=1), 1.0, atol=1e-6)


def test_negative_z2_mirrors_the_kernel():
    index = IndexModel.single(0.0, 1.0)
    plus = build_kernel_matrix(index, "0", 1.0, Z1, WIDE)
    minus = build_kernel_matrix(index, "0", -1.0, Z1, WIDE)
    np.testing.assert_allclose(minus, plus[:, ::-1], atol=1e-12)


def test_kernel_peaks_at_mean_shift():
    matrix = build_kernel_matrix(IndexModel.single(0.0, 2.0), "0", 1.0, Z1, WIDE)
    row = Z1.nearest_index(0.5)
    assert WIDE.nodes[np.argmax(matrix[row])] == pytest.approx(1.0, abs=WIDE.spacing)


def test_kernel_input_errors():
    index = IndexModel.single(0.0, 1.0)
    with pytest.raises(InputError, match="z2 = 0"):
        build_kernel_matrix(index, "0", 0.0, Z1, WIDE)
    with pytest.raises(KernelMassError):
        build_kernel_matrix(index, "0", 1.0, Z1, Grid1D(lo=-1.0, hi=1.0, n=41))


def test_closed_rows_sum_exactly_to_one():
    index = IndexModel.single(0.3, 1.0)
    v_grid = default_v_grid(index, "0", Z1, (0.7,))
    matrix = build_kernel_matrix(index, "0", 0.7, Z1, v_grid)
    closed = close_kernel_rows(matrix, index, "0", 0.7, Z1, v_grid)
    np.testing.assert_allclose(closed.sum(axis=1), 1.0, atol=1e-12)


def test_default_grid_covers_every_z2():
    grid = default_v_grid(IndexModel.single(0.0, 1.0), "0", Z1, (0.5, 2.0))
    assert grid.lo == pytest.approx(-10.0)
    assert grid.hi == pytest.approx(10.0)
    assert grid.n == 161


def _constant_table(level: float) -> CCPTable:
    values = np.empty((2, 1, 1, Z1.n))
    values[0], values[1] = 1.0 - level, level
    return CCPTable((0, 1), ("0",), ((1.0,),), Z1, values)


def test_constant_ccp_gives_constant_kernel():
    h, diag = recover_h(_constant_table(0.3), IndexModel.single(0.0, 1.0))
    np.testing.assert_allclose(h.get(1), 0.3, atol=1e-6)
    np.testing.assert_allclose(h.get(0), 0.7, atol=1e-6)
    assert diag.flags == []


def test_binary_normal_kernel_is_recovered():
    spec = binary_spec(0.0, 1.0)
    h, diag = recover_h(ccp_exact(spec), spec.index)
    v = h.v_grid.nodes
    inside = np.abs(v) <= 2.0
    assert np.max(np.abs(h.get(0)[inside] - gaussian_cdf(-v[inside]))) <= 0.05
    assert not diag.misspecified
    interior = slice(h.v_grid.n // 10, -(h.v_grid.n // 10))
    np.testing.assert_allclose(h.sums()[interior], 1.0, atol=0.02)


def test_wrong_sign_leaves_a_large_residual():
    spec = binary_spec(0.5, 1.0, z2_values=(0.5, 1.0, 1.5))
    table = ccp_exact(spec)
    _, right = recover_h(table, spec.index, pooled=True)
    _, wrong = recover_h(table, IndexModel.single(0.5, -1.0), pooled=True)
    assert wrong.residual > 10.0 * right.residual


def test_shifting_intercept_and_grid_leaves_values_unchanged():
    table = ccp_exact(binary_spec(0.0, 1.0))
    grid = Grid1D(lo=-6.0, hi=6.0, n=121)
    base, _ = recover_h(table, IndexModel.single(0.0, 1.0), v_grid=grid)
    moved, _ = recover_h(table, IndexModel.single(0.4, 1.0), v_grid=grid.shifted(0.4))
    np.testing.assert_allclose(moved.values, base.values, atol=1e-6)


def test_residual_grows_with_regularization():
    spec = binary_spec(0.0, 1.0)
    table = ccp_exact(spec)
    grid = Grid1D(lo=-6.0, hi=6.0, n=121)
    ridge = [recover_h(table, spec.index, v_grid=grid, strategy=Tikhonov(lam=lam), smoothing=False)[1].residual
             for lam in (1e-8, 1e-6, 1e-4, 1e-2)]
    assert all(a <= b + 1e-12 for a, b in zip(ridge, ridge[1:]))
    truncated = [recover_h(table, spec.index, v_grid=grid, strategy=TruncatedSVD(rank=k), smoothing=False)[1].residual
                 for k in (12, 8, 5, 2)]
    assert all(a <= b + 1e-12 for a, b in zip(truncated, truncated[1:]))


def test_empty_cells_are_rejected():
    table = _constant_table(0.3)
    values = table.values.copy()
    values[:, 0, 0, 3] = np.nan
    with pytest.raises(InputError):
        recover_h(CCPTable(table.outcomes, table.w_levels, table.z2_points, Z1, values), IndexModel.single(0.0, 1.0))


def test_clipping_records_overshoot():
    grid = Grid1D(lo=0.0, hi=1.0, n=3)
    h = ChoiceKernel.clipped((0, 1), "0", (grid,), np.array([[1.2, 0.5, -0.05], [-0.2, 0.5, 1.05]]))
    assert h.overshoot == pytest.approx(0.2)
    assert h.values.min() == 0.0 and h.values.max() == 1.0


def _kernel(v_grid: Grid1D, inside) -> ChoiceKernel:
    inside = np.asarray(inside, dtype=np.float64)
    return ChoiceKernel((0, 1), "0", (v_grid,), np.stack([1.0 - inside, inside]))


def test_exact_step_gives_gamma():
    grid = Grid1D(lo=-6.0, hi=6.0, n=121)
    estimate = recover_gamma(_kernel(grid, grid.nodes >= 1.5 - 1e-9))["0"]
    assert estimate.is_step
    assert estimate.max_deviation == 0.0
    assert 1.4 < estimate.crossing <= 1.5
    assert estimate.gamma == pytest.approx(-1.5, abs=grid.spacing)


def test_crossing_is_interpolated_between_nodes():
    grid = Grid1D(lo=-2.0, hi=2.0, n=5)
    estimate = recover_gamma(_kernel(grid, [0.0, 0.0, 0.2, 1.0, 1.0]), halfwidth=0.5)["0"]
    assert estimate.crossing == pytest.approx(0.375)


def test_smooth_kernel_is_not_a_step():
    grid = Grid1D(lo=-6.0, hi=6.0, n=121)
    estimate = recover_gamma(_kernel(grid, gaussian_cdf(grid.nodes)))["0"]
    assert not estimate.is_step
    assert estimate.gamma is None


def test_kernel_without_crossing():
    grid = Grid1D(lo=-6.0, hi=6.0, n=121)
    estimate = recover_gamma(_kernel(grid, np.full(grid.n, 0.2)))["0"]
    assert not estimate.is_step and estimate.crossing is None


def test_deconvolved_step_locates_gamma():
    spec = binary_spec(0.0, 1.0, g=point_mass_g([0.25], [1.0]), z1=(-2.0, 2.0, 81))
    h, _ = recover_h(ccp_exact(spec), spec.index)
    estimate = recover_gamma(h)["0"]
    assert estimate.is_step
    assert abs(estimate.gamma - 0.25) <= h.v_grid.spacing
