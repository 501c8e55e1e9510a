import argparse

from urns import commands
from urns import config


def test_print_defaults(capsys):
    code = commands.defaults.main(argparse.Namespace())
    captured = capsys.readouterr()

    assert code == 0
    assert config.loads(captured.out) == config.ExperimentConfig()
