import fractions
import math

import numpy as np
import pytest

from urns import diagnostics
from urns import engine
from urns import errors
from urns import groups
from urns import simplex
from urns import types

F = fractions.Fraction


def z2_map():
    return simplex.convolution_map(groups.cyclic(2))


def state(counts, step=0):
    return engine.UrnState(np.array(counts), sum(counts), step, None)


def test_exact_conditional_drift_z2():
    result = diagnostics.exact_conditional_drift(state([1, 1]), z2_map(), 3, simplex.Distribution.uniform(2))

    assert result.method == types.DriftMethod.ENUMERATION
    assert result.z == 0
    assert result.xi == F(1, 9)
    assert result.expected_next == F(1, 18)
    assert result.drift == F(1, 18)
    assert result.zeta == F(1, 18)
    assert not result.violation


@pytest.mark.parametrize(
    "simplex_map,counts,next_total",
    [
        (simplex.convolution_map(groups.cyclic(2)), [3, 1], 5),
        (simplex.convolution_map(groups.cyclic(2)), [7, 2], 13),
        (simplex.convolution_map(groups.symmetric(3)), [1, 2, 0, 3, 1, 1], 11),
        (simplex.parity_map(3), [2, 5], 9),
        (simplex.genotype_map(0.25, 0.5), [4, 6], 12),
    ],
    ids=repr,
)
def test_analytic_drift_matches_enumeration(simplex_map, counts, next_total):
    s = state(counts, step=3)
    fixed_points = simplex.find_fixed_points(simplex_map)

    exact = diagnostics.exact_conditional_drift(s, simplex_map, next_total, fixed_points.attracting)
    analytic = diagnostics.analytic_conditional_drift(s, simplex_map, next_total, fixed_points.attracting)

    assert analytic.expected_next == exact.expected_next
    assert analytic.method == types.DriftMethod.ANALYTIC
    assert not exact.violation


def test_conditional_drift_falls_back_to_analytic():
    result = diagnostics.conditional_drift(state([5, 5]), z2_map(), 20, simplex.Distribution.uniform(2), outcome_cap=4)

    assert result.method == types.DriftMethod.ANALYTIC
    assert result.exact


def test_exact_conditional_drift_outcome_cap():
    with pytest.raises(errors.TooManyOutcomes):
        diagnostics.exact_conditional_drift(state([5, 5]), z2_map(), 20, [0.5, 0.5], outcome_cap=4)


def test_exact_conditional_drift_non_increasing():
    with pytest.raises(errors.NonIncreasingSchedule):
        diagnostics.exact_conditional_drift(state([5, 5]), z2_map(), 10, [0.5, 0.5])


def test_monte_carlo_drift_agrees():
    simplex_map = simplex.convolution_map(groups.symmetric(3))
    s = state([1, 2, 0, 3, 1, 1])
    q0 = simplex.Distribution.uniform(6)
    exact = diagnostics.exact_conditional_drift(s, simplex_map, 11, q0)

    result = diagnostics.monte_carlo_drift(s, simplex_map, 11, q0, 20000, seed=5, chunks=4)

    assert result.method == types.DriftMethod.MONTE_CARLO
    assert not result.exact
    assert not result.violation
    assert abs(float(result.drift) - float(exact.drift)) <= 5 * result.std_error


def test_monte_carlo_drift_reproducible():
    a = diagnostics.monte_carlo_drift(state([3, 1]), z2_map(), 8, [0.5, 0.5], 500, seed=2, chunks=3)
    b = diagnostics.monte_carlo_drift(state([3, 1]), z2_map(), 8, [0.5, 0.5], 500, seed=2, chunks=3)

    assert a.drift == b.drift


def test_monte_carlo_drift_too_few_replicates():
    with pytest.raises(errors.InputError):
        diagnostics.monte_carlo_drift(state([1, 1]), z2_map(), 3, [0.5, 0.5], 10)


@pytest.mark.parametrize(
    "counts,expected",
    [
        ((3, 1), 4.0),
        ((1, 1), 2.0),
        ((4, 0), math.inf),
    ],
)
def test_boundary_escape(counts, expected):
    snapshot = engine.Snapshot(0, sum(counts), counts)

    result = diagnostics.boundary_escape(snapshot, np.array([0.0, 1.0]))

    assert result == expected


def test_expected_boundary_escape():
    # S ~ Binomial(1, 1/2): 3/1 and 3/2 with equal probability
    result = diagnostics.expected_boundary_escape(state([1, 1]), z2_map(), 3, np.array([0.0, 1.0]))

    assert result == 2.25


def test_expected_boundary_escape_absorbed():
    result = diagnostics.expected_boundary_escape(state([2, 0]), z2_map(), 3, np.array([0.0, 1.0]))

    assert result == math.inf


def z2_trajectory(steps=300, seed=0, stride=1):
    config = engine.RunConfig(
        simplex_map=z2_map(),
        schedule=engine.GrowthSchedule.unit(2),
        initial_counts=(1, 1),
        stop=engine.StopRule(max_steps=steps),
        stride=stride,
        seed=seed,
    )
    return engine.run(config)


def test_monitor_no_violations():
    trajectory = z2_trajectory()
    q0 = simplex.Distribution.uniform(2)

    result = diagnostics.robbins_siegmund_monitor(
        trajectory,
        z2_map(),
        engine.GrowthSchedule.unit(2),
        q0,
        window=50,
        checkpoints=5,
        boundary_vectors={0: np.array([0.0, 1.0])},
    )

    assert not result.violations
    assert [r.n for r in result.records][:50] == list(range(50))
    assert 50 < len(result.records) <= 55
    assert result.xi_bound == 0.5
    assert result.xi_partial_sums[-1][1] < result.xi_bound
    assert len(result.z_series) == len(trajectory.snapshots)
    assert len(result.boundary_series[0]) == len(trajectory.snapshots)
    assert [n for n, _ in result.boundary_expectations[0]] == [r.n for r in result.records]
    assert all(value > 1.0 for _, value in result.boundary_expectations[0])
    assert result.summary()["violations"] == 0


def test_monitor_needs_two_snapshots():
    trajectory = z2_trajectory(steps=0)

    with pytest.raises(errors.InputError):
        diagnostics.robbins_siegmund_monitor(trajectory, z2_map(), engine.GrowthSchedule.unit(2), [0.5, 0.5])


def make_trajectory(points, total=100):
    snapshots = [engine.Snapshot(n, total, (round(p * total), total - round(p * total))) for n, p in enumerate(points)]
    return engine.Trajectory(seed=0, schedule={}, simplex_map={}, labels=("0", "1"), snapshots=snapshots)


@pytest.mark.parametrize(
    "points,expected",
    [
        ([0.9, 0.5, 0.51, 0.49, 0.5], True),
        ([0.5, 0.5, 0.9, 0.5, 0.5], False),
        ([0.5, 0.5, 0.5, 0.5, 0.6], False),
    ],
)
def test_convergence_verdict(points, expected):
    result = diagnostics.convergence_verdict(make_trajectory(points), [0.5, 0.5], threshold=0.02, window=4)

    assert result.converged == expected
    assert result.to_dict()["converged"] == expected


def test_convergence_verdict_limit():
    result = diagnostics.convergence_verdict(make_trajectory([0.5, 0.52, 0.48]), [0.5, 0.5], window=2)

    assert result.estimated_limit.to_list() == pytest.approx([0.5, 0.5])
    assert result.final_total_variation == pytest.approx(0.02)


def test_convergence_verdict_window_too_long():
    with pytest.raises(errors.InputError):
        diagnostics.convergence_verdict(make_trajectory([0.5, 0.5]), [0.5, 0.5], window=3)


def test_exact_distribution_z2():
    # T(p)_0 = p_0^2 + p_1^2 favours the identity: after 2 steps the law is
    # (1,3): 2/9, (2,2): 1/2, (3,1): 5/18, then (3,1) and (1,3) draw the
    # identity with probability 5/8 and (2,2) with 1/2
    result = diagnostics.exact_distribution((1, 1), z2_map(), engine.GrowthSchedule.unit(2), 3)

    assert result == [
        ((1, 4), F(1, 12)),
        ((2, 3), F(7, 18)),
        ((3, 2), F(17, 48)),
        ((4, 1), F(25, 144)),
    ]


def test_exact_distribution_sums_to_one():
    simplex_map = simplex.convolution_map(groups.symmetric(3))

    result = diagnostics.exact_distribution((0, 0, 1, 1, 0, 0), simplex_map, engine.GrowthSchedule.unit(2), 3)

    assert sum(p for _, p in result) == 1
    assert all(sum(counts) == 5 for counts, _ in result)


def test_exact_distribution_zero_steps():
    result = diagnostics.exact_distribution((1, 2), z2_map(), engine.GrowthSchedule.unit(3), 0)

    assert result == [((1, 2), F(1))]


def test_exact_distribution_cap():
    with pytest.raises(errors.TooManyOutcomes):
        diagnostics.exact_distribution((1, 1), z2_map(), engine.GrowthSchedule.unit(2), 10, cap=20)


def test_oracle_check_support():
    result = diagnostics.oracle_check((1, 1), z2_map(), engine.GrowthSchedule.unit(2), 3, 2000, seed=0)

    assert [c.counts for c in result] == [(1, 4), (2, 3), (3, 2), (4, 1)]
    assert sum(c.frequency for c in result) == pytest.approx(1.0)
    assert all(c.sigma > 0 for c in result)
