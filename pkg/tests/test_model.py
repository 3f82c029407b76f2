import numpy as np
import pytest
from pydantic import ValidationError

from common.errors import InputError
from factories import binary_spec, bundle_spec, multinomial_spec, normal_g, point_mass_g
from model import GaussianMixture, GDistribution, ccp_empirical, ccp_exact, ccp_for_points, choice_given_draw, outcome_set, simulate
from numerics import gaussian_cdf


def test_outcome_sets():
    assert outcome_set(binary_spec()) == [0, 1]
    assert outcome_set(multinomial_spec()) == [0, 1, 2]
    assert outcome_set(bundle_spec(point_mass_g([[0.0, 0.0, 0.0]], [1.0]))) == [(0, 0), (1, 0), (0, 1), (1, 1)]


def test_binary_choice_rule():
    spec = binary_spec()
    assert choice_given_draw(spec, "0", 0.7, [1.0], 0.0, [0.0]) == 1
    assert choice_given_draw(spec, "0", 0.7, [1.0], 0.0, [-1.0]) == 0
    # ties go to the outside option
    assert choice_given_draw(spec, "0", 0.0, [1.0], 0.0, [0.0]) == 0


def test_multinomial_choice_rule():
    spec = multinomial_spec()
    assert choice_given_draw(spec, "0", 0.0, [1.0, 1.0], 0.0, [-1.0, -2.0]) == 0
    assert choice_given_draw(spec, "0", 2.0, [1.0, 1.0], 0.0, [-1.0, -2.0]) == 1


def test_bundle_choice_rule():
    spec = bundle_spec(point_mass_g([[0.0, 0.0, -5.0]], [1.0]))
    # utilities (0, 2, 2, -1): the tie between single goods goes to (1,0)
    assert choice_given_draw(spec, "0", 2.0, [1.0, 1.0], 0.0, [0.0, 0.0, -5.0]) == (1, 0)


def test_binary_normal_ccp_closed_form():
    spec = binary_spec(0.0, 1.0)
    table = ccp_exact(spec)
    z1 = spec.z1_grid.nodes
    np.testing.assert_allclose(table.series(0, "0", 0), gaussian_cdf(-z1 / np.sqrt(2.0)), atol=1e-9)
    assert table.series(0, "0", 0)[32] == pytest.approx(0.5, abs=1e-12)


def test_multinomial_rows_sum_to_one():
    g = GDistribution(dimension=2, by_w={"0": GaussianMixture(
        means=[[-0.5, 0.0], [0.5, 0.5]], scales=[[1.0, 1.0], [0.8, 1.2]], probs=[0.5, 0.5])})
    table = ccp_exact(multinomial_spec(g=g, z1=(-2.0, 2.0, 17), z2_points=((1.0, 1.0), (1.0, 2.0))))
    np.testing.assert_allclose(table.row_sums(), 1.0, atol=1e-8)


def test_bundle_point_mass_rows_sum_to_one():
    g = point_mass_g([[0.3, -0.2, 0.5], [-1.0, 0.4, -0.1]], [0.25, 0.75])
    table = ccp_exact(bundle_spec(g, z2_points=((1.0, 1.0), (0.5, 2.0))))
    np.testing.assert_allclose(table.row_sums(), 1.0, atol=1e-12)


def test_binary_ccp_monotone_in_z1(binary_normal):
    table = ccp_exact(binary_normal)
    assert np.all(np.diff(table.values[1], axis=-1) >= -1e-12)


def test_dominant_atom_pins_choice():
    table = ccp_exact(binary_spec(g=point_mass_g([50.0], [1.0])))
    np.testing.assert_allclose(table.series(1, "0", 0), 1.0, atol=1e-12)


@pytest.mark.parametrize("g", [normal_g(), point_mass_g([-0.3, 0.8], [0.4, 0.6])])
def test_reflected_model_is_observationally_equivalent(g):
    spec = binary_spec(0.2, 0.7, g=g, z2_values=(0.5, 1.5))
    flipped = spec.reflected()
    assert flipped.index.beta0["0"] == -0.2 and flipped.index.beta1["0"] == -0.7
    np.testing.assert_allclose(ccp_exact(flipped).values, ccp_exact(spec).values, atol=1e-9)


def test_ccp_for_points_changes_only_z2():
    spec = binary_spec(0.0, 1.0)
    table = ccp_for_points(spec, [[2.0], [-1.0]])
    assert table.z2_points == ((2.0,), (-1.0,))
    z1 = spec.z1_grid.nodes
    np.testing.assert_allclose(table.series(1, "0", 0), gaussian_cdf(2.0 * z1 / np.sqrt(5.0)), atol=1e-9)
    np.testing.assert_allclose(table.series(1, "0", 1), gaussian_cdf(-z1 / np.sqrt(2.0)), atol=1e-9)


def test_z2_zero_is_rejected():
    with pytest.raises(ValidationError, match="z2 = 0"):
        binary_spec(z2_values=(1.0, 0.0))


def test_multinomial_needs_equal_coordinate_point():
    with pytest.raises(ValidationError):
        multinomial_spec(z2_points=((1.0, 2.0),))


def test_simulate_needs_draws():
    with pytest.raises(InputError):
        simulate(binary_spec(), 0, seed=1)


def test_simulate_is_deterministic():
    spec = binary_spec(0.5, 1.0, z2_values=(0.5, 1.5))
    first, second = simulate(spec, 2000, seed=5), simulate(spec, 2000, seed=5)
    np.testing.assert_array_equal(first.y, second.y)
    np.testing.assert_array_equal(first.z1, second.z1)
    assert not np.array_equal(first.y, simulate(spec, 2000, seed=6).y)


def test_empirical_ccp_matches_exact():
    spec = binary_spec(0.0, 1.0, z1=(-1.0, 1.0, 3))
    table = ccp_empirical(simulate(spec, 2_000_000, seed=0), spec)
    np.testing.assert_allclose(table.values, ccp_exact(spec).values, atol=0.002)


def test_empirical_error_shrinks_with_n():
    spec = binary_spec(0.0, 1.0, z1=(-1.0, 1.0, 5))
    exact = ccp_exact(spec).values
    errors = [np.sqrt(np.mean((ccp_empirical(simulate(spec, n, seed=2), spec).values - exact) ** 2))
              for n in (10_000, 100_000, 1_000_000)]
    assert errors[0] > errors[1] > errors[2]
    # 1/sqrt(n) predicts a factor of 10 across the range
    assert errors[0] > 3.0 * errors[2]


def test_empty_cells_stay_missing():
    spec = binary_spec()
    table = ccp_empirical(simulate(spec, 3, seed=0), spec)
    assert table.missing().sum() >= spec.z1_grid.n - 3
    assert np.isnan(table.values[:, 0, 0, table.missing()[0, 0]]).all()
