import pathlib

import pytest
import yaml

from urns import __version__
from urns import main


def test_version(capsys):
    code = main.main(["-V"])
    captured = capsys.readouterr()

    assert code == 0
    assert captured.out.strip() == __version__


def test_version_matches_manifest():
    manifest = pathlib.Path(__file__).parents[2] / "pyproject.toml"

    assert f'version = "{__version__}"' in manifest.read_text()


def test_no_command():
    assert main.main([]) == 1


def test_print_defaults(capsys):
    code = main.main(["--quiet", "print-defaults"])
    captured = capsys.readouterr()

    assert code == 0
    assert yaml.safe_load(captured.out)["map"]["kind"] == "convolution"


def test_parse_args_simulate():
    args = main.parse_args(["simulate", "--seed-range", "0..3", "--out", "runs", "--stride", "10"])

    assert args.command == "simulate"
    assert args.seed_range == "0..3"
    assert args.seeds is None
    assert args.out == "runs"
    assert args.stride == 10


def test_parse_args_seeds_exclusive():
    with pytest.raises(SystemExit):
        main.parse_args(["simulate", "--seeds", "1,2", "--seed-range", "0..3"])


def test_parse_args_verbose_quiet_exclusive():
    with pytest.raises(SystemExit):
        main.parse_args(["-v", "-q", "print-defaults"])


def test_invalid_fitness_exits_2(tmp_path, caplog):
    path = tmp_path / "config.yml"
    path.write_text("map: {kind: genotype, s: 1.5, t: 0.1}\n")

    code = main.main(["simulate", "--config", str(path), "--out", str(tmp_path / "out")])

    assert code == 2
    assert "InvalidFitness" in caplog.text


@pytest.mark.parametrize("table", ["nosuchtable", "broken.yml"])
def test_bad_cayley_table_exits_2(tmp_path, monkeypatch, caplog, table):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "broken.yml").write_text("elements: [e\n")
    path = tmp_path / "config.yml"
    path.write_text(f"map: {{kind: convolution, group: {{table: {table}}}}}\n")
    output = tmp_path / "points.yml"

    code = main.main(["fixed-points", "--config", str(path), "-o", str(output)])

    assert code == 2
    assert "GroupError" in caplog.text


def test_bad_seed_range_exits_2(tmp_path):
    code = main.main(["simulate", "--seed-range", "5..1", "--out", str(tmp_path)])

    assert code == 2


def test_verify_failure_exits_1(tmp_path):
    path = tmp_path / "config.yml"
    path.write_text("schedule: {kind: geometric, ratio: 2.0}\nchecks: {samples: 500, samples_per_radius: 100}\n")
    output = tmp_path / "report.yml"

    code = main.main(["verify", "--config", str(path), "-o", str(output)])

    assert code == 1
    reports = yaml.safe_load(output.read_text())["reports"]
    assert [r["pass"] for r in reports] == [True, True, False]


def test_simulate_then_diagnose(tmp_path):
    path = tmp_path / "config.yml"
    path.write_text("stop: {max_steps: 300}\ndiagnose: {window: 50, checkpoints: 3, threshold: 1.0}\n")
    out = tmp_path / "out"

    assert main.main(["simulate", "--config", str(path), "--seeds", "0,1", "--out", str(out)]) == 0

    report = tmp_path / "report.yml"
    trajectories = [str(out / "seed-0.csv"), str(out / "seed-1.csv")]
    code = main.main(["diagnose", *trajectories, "--config", str(path), "--out", str(out), "-o", str(report)])

    assert code == 0
    assert len(yaml.safe_load(report.read_text())["trajectories"]) == 2
    assert (out / "seed-1.drift.csv").exists()
