import fractions
import math

import numpy as np
import pytest

from urns import const
from urns import errors
from urns import groups
from urns import simplex
from urns import tables


@pytest.mark.parametrize(
    "weights",
    [
        [],
        [0.5, 0.6],
        [1.5, -0.5],
        [float("nan"), 1.0],
    ],
)
def test_distribution_invalid(weights):
    with pytest.raises(errors.InvalidDistribution):
        simplex.Distribution(weights)


def test_distribution_from_counts():
    result = simplex.Distribution.from_counts([1, 3])

    assert result.to_list() == [0.25, 0.75]
    assert result.total == 4
    assert result.exact() == [fractions.Fraction(1, 4), fractions.Fraction(3, 4)]


def test_distribution_from_counts_empty():
    with pytest.raises(errors.InvalidDistribution):
        simplex.Distribution.from_counts([0, 0])


def test_distribution_is_read_only():
    result = simplex.Distribution.uniform(3)

    with pytest.raises(ValueError):
        result.weights[0] = 1.0


def test_distribution_distances():
    a = simplex.Distribution.point_mass(2, 0)
    b = simplex.Distribution.uniform(2)

    assert math.isclose(a.distance(b), math.sqrt(0.5))
    assert a.sup_distance(b) == 0.5
    assert a.total_variation(b) == 0.5


def test_convolution_z2_example():
    simplex_map = simplex.convolution_map(groups.cyclic(2))

    result = simplex_map.apply(simplex.Distribution([0.3, 0.7]))

    np.testing.assert_allclose(result.weights, [0.58, 0.42], atol=1e-15)


def test_convolution_uniform_on_subgroup_is_fixed():
    group = groups.cyclic(4)
    simplex_map = simplex.convolution_map(group)
    point = simplex.Distribution.uniform_on([True, False, True, False])

    result = simplex_map.apply(point)

    assert result.sup_distance(point) <= const.FIXED_POINT_TOLERANCE


def test_convolution_batched():
    simplex_map = simplex.convolution_map(groups.symmetric(3))
    rng = np.random.default_rng(0)
    points = rng.dirichlet(np.ones(6), size=(4, 5))

    result = simplex_map.apply_weights(points)

    assert result.shape == (4, 5, 6)
    np.testing.assert_allclose(result.sum(axis=-1), 1.0, atol=1e-12)
    np.testing.assert_allclose(result[2, 3], simplex_map.apply_weights(points[2, 3]), atol=1e-15)


@pytest.mark.parametrize(
    "simplex_map",
    [
        simplex.convolution_map(groups.symmetric(3)),
        simplex.convolution_map(groups.load_cayley_table(tables.QUATERNION)),
        simplex.parity_map(3),
        simplex.genotype_map(0.2, 0.3),
        simplex.genotype_map(-0.5, 0.25),
    ],
    ids=repr,
)
def test_apply_exact_matches_float(simplex_map):
    counts = list(range(1, simplex_map.size + 1))
    total = sum(counts)
    exact = [fractions.Fraction(c, total) for c in counts]

    result = simplex_map.apply_exact(exact)

    assert sum(result) == 1
    np.testing.assert_allclose(
        [float(x) for x in result],
        simplex_map.apply_weights(np.array(counts) / total),
        atol=1e-14,
    )


def test_parity_two_matches_convolution_z2():
    parity = simplex.parity_map(2)
    convolution = simplex.convolution_map(groups.cyclic(2))
    p = np.linspace(0.0, 1.0, 1000)
    points = np.stack([1.0 - p, p], axis=-1)

    np.testing.assert_allclose(parity.apply_weights(points), convolution.apply_weights(points), rtol=0, atol=1e-15)


@pytest.mark.parametrize(
    "p,k,expected",
    [
        (0.0, 3, 0.0),
        (0.5, 3, 0.5),
        (1.0, 2, 0.0),
        (1.0, 3, 1.0),
        (0.25, 1, 0.25),
    ],
)
def test_parity_map(p, k, expected):
    result = simplex.parity_map(k).apply(simplex.Distribution([1.0 - p, p]))

    assert math.isclose(result.weights[1], expected, abs_tol=1e-15)


def test_parity_invalid_k():
    with pytest.raises(errors.InputError):
        simplex.parity_map(0)


def test_binary_maps_need_two_labels():
    with pytest.raises(errors.NonBinaryStateSpace):
        simplex.parity_map(2, labels=("a", "b", "c"))

    with pytest.raises(errors.NonBinaryStateSpace):
        simplex.genotype_map(0.1, 0.1, labels=("A",))


@pytest.mark.parametrize("s,t", [(1.5, 0.0), (0.0, 1.0), (1.0, 1.0)])
def test_genotype_invalid_fitness(s, t):
    with pytest.raises(errors.InvalidFitness):
        simplex.genotype_map(s, t)


def test_genotype_equilibrium_is_fixed():
    simplex_map = simplex.genotype_map(0.2, 0.3)
    point = simplex.Distribution.binary(0.6)

    result = simplex_map.apply(point)

    assert math.isclose(simplex_map.equilibrium, 0.6)
    assert result.sup_distance(point) <= const.FIXED_POINT_TOLERANCE


def test_genotype_neutral_is_identity():
    simplex_map = simplex.genotype_map(0.0, 0.0)
    points = np.random.default_rng(1).dirichlet([1.0, 1.0], size=100)

    np.testing.assert_allclose(simplex_map.apply_weights(points), points, atol=1e-15)
    assert simplex_map.equilibrium is None


@pytest.mark.parametrize(
    "group,expected",
    [
        (groups.cyclic(2), 2),
        (groups.cyclic(4), 3),
        (groups.cyclic(6), 4),
        (groups.symmetric(3), 6),
        (groups.load_cayley_table(tables.KLEIN), 5),
    ],
    ids=lambda x: getattr(x, "name", str(x)),
)
def test_convolution_fixed_points(group, expected):
    simplex_map = simplex.convolution_map(group)

    result = simplex.find_fixed_points(simplex_map)

    assert len(result.points) == expected
    assert all(simplex_map.apply(q).sup_distance(q) <= const.FIXED_POINT_TOLERANCE for q in result.points)
    assert all(simplex.is_constant_on_support(q.weights) for q in result.points)
    assert result.attracting.sup_distance(simplex.Distribution.uniform(group.order)) == 0.0
    assert result.boundary_indices == list(range(expected - 1))


def test_convolution_fixed_points_z2_spacing():
    result = simplex.find_fixed_points(simplex.convolution_map(groups.cyclic(2)))

    assert math.isclose(result.min_distance(), math.sqrt(0.5))
    assert result.boundary_vectors[0].tolist() == [0.0, 1.0]


@pytest.mark.parametrize(
    "k,expected,attracting",
    [
        (1, 3, False),
        (2, 2, True),
        (3, 3, True),
        (4, 2, True),
    ],
)
def test_parity_fixed_points(k, expected, attracting):
    result = simplex.find_fixed_points(simplex.parity_map(k))

    assert len(result.points) == expected
    if attracting:
        assert result.attracting.to_list() == [0.5, 0.5]
    else:
        with pytest.raises(errors.NoAttractingPoint):
            result.attracting


@pytest.mark.parametrize(
    "s,t,expected,attracting",
    [
        (0.2, 0.3, 3, 0.6),
        (-0.2, 0.3, 2, 1.0),
        (0.2, -0.3, 2, 0.0),
        (-0.2, 0.0, 2, 1.0),
        (0.0, -0.2, 2, 0.0),
        (0.0, 0.0, 3, None),
        (-0.2, -0.3, 3, None),
    ],
)
def test_genotype_fixed_points(s, t, expected, attracting):
    result = simplex.find_fixed_points(simplex.genotype_map(s, t))

    assert len(result.points) == expected
    if attracting is None:
        assert result.attracting_index is None
    else:
        assert math.isclose(result.attracting.weights[0], attracting)


def test_fixed_points_to_dict():
    simplex_map = simplex.convolution_map(groups.cyclic(2))
    result = simplex.find_fixed_points(simplex_map).to_dict(simplex_map.labels)

    assert result["attracting_index"] == 1
    assert result["points"][0]["support"] == ["0"]
    assert result["points"][1]["attracting"]


@pytest.mark.parametrize(
    "weights,expected",
    [
        ([0.5, 0.0, 0.5], True),
        ([1.0, 0.0], True),
        ([0.25, 0.75], False),
    ],
)
def test_is_constant_on_support(weights, expected):
    assert simplex.is_constant_on_support(weights) == expected


def random_points(size, count, seed=0):
    rng = np.random.default_rng(seed)
    dense = rng.dirichlet(np.ones(size), size=count)
    # Random supports, the first label is always kept
    mask = rng.random((count, size)) < 0.5
    mask[:, 0] = True
    sparse = dense * mask
    return np.concatenate([dense, sparse / sparse.sum(axis=1, keepdims=True)])


@pytest.mark.parametrize(
    "group",
    [
        groups.cyclic(2),
        groups.cyclic(6),
        groups.symmetric(3),
        groups.dihedral(4),
        groups.load_cayley_table(tables.KLEIN),
    ],
)
def test_convolution_contraction(group):
    simplex_map = simplex.convolution_map(group)
    subgroups = groups.enumerate_subgroups(group)
    uniform = [simplex.Distribution.uniform_on(s.member_mask).weights for s in subgroups]
    points = np.vstack([random_points(group.order, 2000), uniform])

    before = (points**2).sum(axis=1)
    after = (simplex_map.apply_weights(points) ** 2).sum(axis=1)

    assert (after <= before + 1e-12).all()
    equal = np.isclose(after, before, rtol=0.0, atol=1e-14)
    assert equal[-len(subgroups):].all()
    for p in points[equal]:
        assert simplex.is_constant_on_support(p)


@pytest.mark.parametrize(
    "group",
    [
        groups.cyclic(4),
        groups.cyclic(6),
        groups.symmetric(3),
        groups.dihedral(4),
        groups.load_cayley_table(tables.QUATERNION),
    ],
)
def test_convolution_boundary_escape_bound(group):
    simplex_map = simplex.convolution_map(group)
    points = random_points(group.order, 2000, seed=1)
    mapped = simplex_map.apply_weights(points)

    for subgroup in groups.enumerate_subgroups(group)[:-1]:
        c = 1.0 - np.array(subgroup.member_mask, dtype=float)
        escaped = points @ c

        assert (mapped @ c >= 2 * escaped * (1 - escaped) - 1e-12).all()


@pytest.mark.parametrize(
    "simplex_map",
    [
        simplex.convolution_map(groups.symmetric(3)),
        simplex.convolution_map(groups.cyclic(5)),
        simplex.parity_map(3),
        simplex.parity_map(4),
        simplex.genotype_map(0.2, 0.3),
        simplex.genotype_map(-0.5, 0.4),
    ],
)
def test_maps_preserve_simplex(simplex_map):
    points = np.random.default_rng(2).dirichlet(np.ones(simplex_map.size), size=10**4)

    result = simplex_map.apply_weights(points)

    assert result.shape == points.shape
    assert (result >= 0).all()
    np.testing.assert_allclose(result.sum(axis=1), 1.0, rtol=0.0, atol=1e-12)
