import logging

import numpy as np

from urns import conditions
from urns import config
from urns import errors
from urns import export
from urns import types

logger = logging.getLogger(__name__)


def failed(condition, error, parameters=None):
    logger.warning("%s failed: %s", condition.value, error)
    return conditions.ConditionReport(
        condition=condition,
        passed=False,
        parameters=parameters or {},
        details={"error": type(error).__name__, "message": str(error)},
    )


def run_checks(experiment):
    checks = experiment.config.checks
    simplex_map = experiment.simplex_map
    fixed_points = experiment.fixed_points()
    rng = np.random.default_rng(checks.seed)
    reports = []

    try:
        reports.append(
            conditions.check_A1(
                simplex_map,
                fixed_points,
                samples=checks.samples,
                exclusion_radius=checks.exclusion_radius,
                q0=checks.q0,
                rng=rng,
            )
        )
    except errors.CheckError as e:
        reports.append(failed(types.Condition.A1, e))

    try:
        reports.append(
            conditions.check_A2(
                simplex_map,
                fixed_points,
                experiment.p0,
                radii=checks.radii,
                samples_per_radius=checks.samples_per_radius,
                margin=checks.margin,
                rng=rng,
            )
        )
    except errors.CheckError as e:
        reports.append(failed(types.Condition.A2, e))

    try:
        reports.append(
            conditions.check_A3(
                experiment.schedule,
                fixed_points,
                horizon=checks.horizon,
                from_step=checks.from_step,
            )
        )
    except errors.ScheduleExhausted as e:
        reports.append(failed(types.Condition.A3, e))
    return reports


def main(args):
    cfg = config.from_args(args)
    experiment = config.build(cfg)
    reports = run_checks(experiment)

    export.dump_structured({"reports": [r.to_dict() for r in reports]}, args.output)
    failures = [r.condition.value for r in reports if not r.passed]
    if failures:
        logger.warning("Failed conditions: %s", ", ".join(failures))
        return 1

    logger.info("All conditions passed")
    return 0
