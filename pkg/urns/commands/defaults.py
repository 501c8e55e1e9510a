import logging

from urns import config

logger = logging.getLogger(__name__)


def main(args):
    logger.info("Printing default configuration")
    print(config.dumps(config.ExperimentConfig()), end="")
    return 0
