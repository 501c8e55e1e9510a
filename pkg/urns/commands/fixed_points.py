import logging

from urns import config
from urns import export

logger = logging.getLogger(__name__)


def main(args):
    cfg = config.from_args(args)
    experiment = config.build(cfg)
    fixed_points = experiment.fixed_points()

    data = {
        "map": experiment.simplex_map.descriptor(),
        "labels": list(experiment.simplex_map.labels),
        **fixed_points.to_dict(experiment.simplex_map.labels),
    }
    logger.info("Printing %s fixed points", len(fixed_points.points))
    export.dump_structured(data, args.output)
    return 0
