"""Sampling-based checks of the convergence hypotheses.

A1: the designated fixed point is contracting in Euclidean norm.
A2: mass escapes every boundary fixed point's support.
A3: the growth ratio of the population is small against the spacing of the
fixed points.

Checks report the worst observed value and its witness, they are not proofs.
"""
import dataclasses
import logging

import numpy as np

from urns import const
from urns import errors
from urns import simplex
from urns import types

logger = logging.getLogger(__name__)


@dataclasses.dataclass
class ConditionReport:
    condition: types.Condition
    passed: bool
    worst_value: float = None
    witness_point: list = None
    parameters: dict = dataclasses.field(default_factory=dict)
    details: dict = dataclasses.field(default_factory=dict)

    def to_dict(self):
        return {
            "condition": self.condition.value,
            "pass": self.passed,
            "worst_value": self.worst_value,
            "witness_point": self.witness_point,
            "parameters": self.parameters,
            "details": self.details,
        }


def _resolve_q0(fixed_points, q0):
    if q0 is not None:
        return q0 if isinstance(q0, simplex.Distribution) else simplex.Distribution(q0)
    return fixed_points.attracting


def sample_simplex(rng, size, samples):
    # Dirichlet(1, ..., 1) is uniform on the simplex
    return rng.dirichlet(np.ones(size), size=samples)


def check_A1(
    simplex_map,
    fixed_points,
    samples=const.DEFAULT_A1_SAMPLES,
    exclusion_radius=const.DEFAULT_EXCLUSION_RADIUS,
    q0=None,
    rng=None,
):
    if samples < 1:
        raise errors.InputError(f"A1 needs at least one sample, got {samples}")
    q0 = _resolve_q0(fixed_points, q0)
    rng = rng if rng is not None else np.random.default_rng()

    points = sample_simplex(rng, simplex_map.size, samples)
    fixed = np.array([q.to_list() for q in fixed_points.points] + [q0.to_list()])
    distances = np.linalg.norm(points[:, np.newaxis, :] - fixed[np.newaxis, :, :], axis=-1)
    kept = points[distances.min(axis=1) > exclusion_radius]
    excluded = samples - len(kept)
    if excluded:
        logger.warning("A1 excluded %s of %s samples near fixed points", excluded, samples)
    if len(kept) == 0:
        raise errors.AllSamplesExcluded(f"All {samples} samples fall within {exclusion_radius} of a fixed point")

    mapped = simplex_map.apply_weights(kept)
    ratios = np.linalg.norm(mapped - q0.weights, axis=-1) / np.linalg.norm(kept - q0.weights, axis=-1)
    worst = int(np.argmax(ratios))
    report = ConditionReport(
        condition=types.Condition.A1,
        passed=bool(ratios[worst] < 1.0 - const.RATIO_TOLERANCE),
        worst_value=float(ratios[worst]),
        witness_point=kept[worst].tolist(),
        parameters={
            "samples": samples,
            "exclusion_radius": exclusion_radius,
            "q0": q0.to_list(),
        },
        details={"evaluated": len(kept), "excluded": excluded},
    )
    logger.info("A1 worst contraction ratio %s at %s", report.worst_value, report.witness_point)
    return report


def sample_ball(rng, center, radius, samples):
    # Points of the simplex within `radius` of `center`, never equal to it
    directions = sample_simplex(rng, center.size, samples) - center
    lengths = np.linalg.norm(directions, axis=-1)
    scale = radius * (1.0 - rng.random(samples)) / np.maximum(lengths, radius)
    return center + directions * np.minimum(scale, 1.0)[:, np.newaxis]


def check_A2(
    simplex_map,
    fixed_points,
    p0,
    radii=const.DEFAULT_A2_RADII,
    samples_per_radius=const.DEFAULT_A2_SAMPLES_PER_RADIUS,
    margin=const.DEFAULT_A2_MARGIN,
    rng=None,
):
    rng = rng if rng is not None else np.random.default_rng()
    p0 = p0 if isinstance(p0, simplex.Distribution) else simplex.Distribution(p0)
    boundary = fixed_points.boundary_indices
    radii = sorted(radii, reverse=True)
    parameters = {
        "radii": list(radii),
        "samples_per_radius": samples_per_radius,
        "margin": margin,
        "p0": p0.to_list(),
    }
    if not boundary:
        logger.warning("A2 is vacuous without boundary fixed points")
        return ConditionReport(condition=types.Condition.A2, passed=True, parameters=parameters, details={"vacuous": True})

    for j in boundary:
        mass = float(fixed_points.boundary_vectors[j] @ p0.weights)
        if mass <= 0:
            raise errors.InitialMassZero(
                f"Initial distribution {p0.to_list()} puts no mass off the support of "
                f"{fixed_points.descriptions[j]}"
            )

    worst_value, witness = np.inf, None
    per_point = {}
    for j in boundary:
        c = fixed_points.boundary_vectors[j]
        center = fixed_points.points[j].weights
        minima = []
        for radius in radii:
            points = sample_ball(rng, center, radius, samples_per_radius)
            escaping = points @ c
            points = points[escaping > 0]
            if len(points) == 0:
                minima.append(None)
                continue
            ratios = (simplex_map.apply_weights(points) @ c) / (points @ c)
            i = int(np.argmin(ratios))
            minima.append(float(ratios[i]))
            if ratios[i] < worst_value:
                worst_value, witness = float(ratios[i]), points[i].tolist()
        per_point[fixed_points.descriptions[j]] = dict(zip(radii, minima))

    passed = all(
        value is not None and value >= 1.0 + margin
        for minima in per_point.values()
        for value in minima.values()
    )
    report = ConditionReport(
        condition=types.Condition.A2,
        passed=passed,
        worst_value=worst_value,
        witness_point=witness,
        parameters=parameters,
        details={"minimum_ratio": per_point, "vacuous": False},
    )
    logger.info("A2 minimum escape ratio %s at %s", report.worst_value, report.witness_point)
    return report


def check_A3(schedule, fixed_points, horizon=const.DEFAULT_A3_HORIZON, from_step=0):
    if horizon < 1:
        raise errors.InputError(f"A3 needs horizon >= 1, got {horizon}")
    if not 0 <= from_step < horizon:
        raise errors.InputError(f"A3 from_step must be in 0..{horizon - 1}, got {from_step}")
    if schedule.kind == types.ScheduleKind.EXPLICIT and horizon >= len(schedule.values):
        horizon = len(schedule.values) - 1
        logger.info("A3 horizon capped at the %s growth steps of the explicit schedule", horizon)
        if from_step >= horizon:
            raise errors.ScheduleExhausted(f"Explicit schedule has {horizon} growth steps, A3 starts at step {from_step}")
    totals = schedule.sequence(horizon)
    ratios = [b / a for a, b in zip(totals, totals[1:])][from_step:]
    worst = int(np.argmax(ratios))
    c_emp = ratios[worst]
    d_min = fixed_points.min_distance()
    parameters = {"schedule": schedule.descriptor(), "horizon": horizon, "from_step": from_step}

    if d_min is None:
        logger.warning("A3 is vacuous with a single fixed point")
        return ConditionReport(
            condition=types.Condition.A3,
            passed=True,
            worst_value=c_emp,
            parameters=parameters,
            details={"vacuous": True, "step": worst + from_step},
        )

    report = ConditionReport(
        condition=types.Condition.A3,
        passed=c_emp - 1.0 < d_min,
        worst_value=c_emp,
        parameters=parameters,
        details={"min_fixed_point_distance": d_min, "step": worst + from_step, "vacuous": False},
    )
    logger.info("A3 growth ratio %s against fixed point spacing %s", c_emp, d_min)
    return report
