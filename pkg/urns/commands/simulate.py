import logging
import pathlib

from urns import config
from urns import const
from urns import engine
from urns import errors
from urns import export
from urns import util

logger = logging.getLogger(__name__)


def trajectory_path(output_dir, seed):
    return output_dir / f"seed-{seed}{const.TRAJECTORY_SUFFIX}"


def sweep_summary(experiment, trajectories, config_digest):
    try:
        target = experiment.fixed_points().attracting
    except errors.NoAttractingPoint:
        target = None

    runs = []
    for trajectory in trajectories:
        summary = trajectory.summary()
        if target is not None:
            summary["tv_to_target"] = util.total_variation(trajectory.last.p, target.weights)
        runs.append(summary)

    return {
        "config_digest": config_digest,
        "map": experiment.simplex_map.descriptor(),
        "schedule": experiment.schedule.descriptor(),
        "labels": list(experiment.simplex_map.labels),
        "target": target.to_list() if target is not None else None,
        "sampler": engine.describe_sampler(),
        "runs": runs,
    }


def main(args):
    cfg = config.from_args(args)
    experiment = config.build(cfg)
    config_digest = config.digest(cfg)

    output_dir = pathlib.Path(cfg.output)
    output_dir.mkdir(parents=True, exist_ok=True)

    trajectories = engine.run_sweep(experiment.run_config(), cfg.seeds, workers=cfg.workers)
    for trajectory in trajectories:
        path = trajectory_path(output_dir, trajectory.seed)
        logger.info("Writing trajectory %s", path)
        with path.open("w", newline="") as fh:
            export.write_trajectory(trajectory, fh, config_digest)

    summary_path = output_dir / const.SUMMARY_FILE
    logger.info("Writing sweep summary %s", summary_path)
    with summary_path.open("w") as fh:
        export.dump_structured(sweep_summary(experiment, trajectories, config_digest), fh)

    return 0
