import logging
import pathlib

from urns import config
from urns import const
from urns import diagnostics
from urns import engine
from urns import errors
from urns import export
from urns import simplex

logger = logging.getLogger(__name__)


def drift_path(output_dir, trajectory_name):
    stem = pathlib.PurePath(trajectory_name).name
    if stem.endswith(const.TRAJECTORY_SUFFIX):
        stem = stem[: -len(const.TRAJECTORY_SUFFIX)]
    return output_dir / f"{stem}{const.DRIFT_SUFFIX}"


def monte_carlo_comparison(experiment, trajectory, q0, records):
    # Cross-check the latest exact drift record against sampling
    settings = experiment.config.diagnose
    record = next((r for r in reversed(records) if r.exact), None)
    if record is None:
        return None
    snapshot = next(s for s in trajectory.snapshots if s.n == record.n)
    estimate = diagnostics.monte_carlo_drift(
        diagnostics.state_at(snapshot),
        experiment.simplex_map,
        record.next_total,
        q0,
        settings.replicates,
        seed=settings.seed,
    )
    difference = abs(float(estimate.drift) - float(record.drift))
    return {
        "n": record.n,
        "exact_drift": float(record.drift),
        "monte_carlo_drift": float(estimate.drift),
        "std_error": estimate.std_error,
        "within": difference <= const.SIGMA_BAND * estimate.std_error + const.NORMALIZATION_TOLERANCE,
    }


def diagnose_trajectory(experiment, fixed_points, fh, q0, output_dir):
    settings = experiment.config.diagnose
    name = getattr(fh, "name", "<stream>")
    trajectory = export.read_trajectory(fh)
    if list(trajectory.labels) != list(experiment.simplex_map.labels):
        raise errors.InputError(
            f"Trajectory {name} labels {list(trajectory.labels)} do not match the map labels "
            f"{list(experiment.simplex_map.labels)}"
        )
    engine.check_consistent(trajectory, experiment.schedule)
    if trajectory.config_digest != config.digest(experiment.config):
        logger.warning("Trajectory %s was written by a different configuration (digest %s)", name, trajectory.config_digest)

    monitor = diagnostics.robbins_siegmund_monitor(
        trajectory,
        experiment.simplex_map,
        experiment.schedule,
        q0,
        window=settings.window,
        checkpoints=settings.checkpoints,
        outcome_cap=experiment.config.limits.monitor_outcome_cap,
        boundary_vectors=fixed_points.boundary_vectors,
    )
    path = drift_path(output_dir, name)
    logger.info("Writing drift records %s", path)
    with path.open("w", newline="") as out:
        export.write_drift(monitor.records, out)

    result = {"trajectory": name, "seed": trajectory.seed, "monitor": monitor.summary()}
    result["boundary_escape"] = {}
    for j, series in monitor.boundary_series.items():
        expectations = monitor.boundary_expectations[j]
        result["boundary_escape"][fixed_points.descriptions[j]] = {
            "final": series[-1][1],
            "expected_next": expectations[-1][1] if expectations else None,
        }
    ok = not monitor.violations

    if len(trajectory.snapshots) >= settings.verdict_window:
        verdict = diagnostics.convergence_verdict(
            trajectory, q0, threshold=settings.threshold, window=settings.verdict_window
        )
        result["verdict"] = verdict.to_dict()
        ok = ok and verdict.converged
    else:
        logger.warning("Trajectory %s is too short for a verdict window of %s", name, settings.verdict_window)
        result["verdict"] = None
        ok = False

    if settings.replicates:
        comparison = monte_carlo_comparison(experiment, trajectory, q0, monitor.records)
        result["monte_carlo"] = comparison
        ok = ok and (comparison is None or comparison["within"])

    return result, ok


def main(args):
    cfg = config.from_args(args)
    experiment = config.build(cfg)
    settings = cfg.diagnose
    fixed_points = experiment.fixed_points()

    if settings.target is not None:
        q0 = simplex.Distribution(settings.target)
    else:
        q0 = fixed_points.attracting

    output_dir = pathlib.Path(cfg.output)
    output_dir.mkdir(parents=True, exist_ok=True)

    results, ok = [], True
    for fh in args.trajectories:
        result, trajectory_ok = diagnose_trajectory(experiment, fixed_points, fh, q0, output_dir)
        results.append(result)
        ok = ok and trajectory_ok

    report = {"target": q0.to_list(), "trajectories": results}
    if settings.oracle_steps:
        comparisons = diagnostics.oracle_check(
            experiment.initial_counts,
            experiment.simplex_map,
            experiment.schedule,
            settings.oracle_steps,
            settings.oracle_runs,
            seed=settings.seed,
            cap=cfg.limits.distribution_cap,
        )
        report["oracle"] = [c.to_dict() for c in comparisons]
        ok = ok and all(c.within for c in comparisons)

    export.dump_structured(report, args.output)
    return 0 if ok else 1
