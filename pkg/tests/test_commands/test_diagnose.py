import argparse
import io

import pytest
import yaml

from urns import commands
from urns import engine
from urns import errors
from urns import export
from urns import groups
from urns import simplex


def make_file(data, name):
    result = io.StringIO(data)
    result.name = name
    return result


def z2_trajectory_file(steps, seed, name, schedule=None):
    config = engine.RunConfig(
        simplex_map=simplex.convolution_map(groups.cyclic(2)),
        schedule=schedule or engine.GrowthSchedule.unit(2),
        initial_counts=(1, 1),
        stop=engine.StopRule(max_steps=steps),
        seed=seed,
    )
    fh = io.StringIO()
    export.write_trajectory(engine.run(config), fh, "abc")
    return make_file(fh.getvalue(), name)


def run_diagnose(tmp_path, trajectories, data=""):
    output = make_file("", "test_output")
    args = argparse.Namespace(
        trajectories=trajectories,
        config=make_file(data, "test_config"),
        out=str(tmp_path),
        output=output,
    )
    code = commands.diagnose.main(args)
    return code, yaml.safe_load(output.getvalue())


def test_diagnose_monitor(tmp_path):
    trajectories = [z2_trajectory_file(400, seed, f"seed-{seed}.csv") for seed in (0, 1)]

    _, result = run_diagnose(tmp_path, trajectories, "diagnose: {window: 100, checkpoints: 5, threshold: 1.0}")

    assert result["target"] == [0.5, 0.5]
    assert [t["trajectory"] for t in result["trajectories"]] == ["seed-0.csv", "seed-1.csv"]
    for t in result["trajectories"]:
        assert t["monitor"]["violations"] == 0
        assert t["monitor"]["xi_bound"] == 0.5
        assert t["verdict"]["converged"]
        escape = t["boundary_escape"]["uniform on {0}"]
        assert escape["final"] > 1.0
        assert escape["expected_next"] > 1.0
    assert (tmp_path / "seed-0.drift.csv").exists()
    assert (tmp_path / "seed-1.drift.csv").read_text().startswith("n,k,next_k,")


def test_diagnose_not_converged(tmp_path):
    trajectories = [z2_trajectory_file(5, 0, "seed-0.csv")]

    code, result = run_diagnose(tmp_path, trajectories, "diagnose: {window: 5, threshold: 0.0, verdict_window: 2}")

    assert code == 1
    assert not result["trajectories"][0]["verdict"]["converged"]


def test_diagnose_too_short_for_verdict(tmp_path):
    trajectories = [z2_trajectory_file(3, 0, "seed-0.csv")]

    code, result = run_diagnose(tmp_path, trajectories, "diagnose: {verdict_window: 10}")

    assert code == 1
    assert result["trajectories"][0]["verdict"] is None


def test_diagnose_monte_carlo_and_oracle(tmp_path):
    trajectories = [z2_trajectory_file(50, 0, "seed-0.csv")]
    data = "diagnose: {window: 50, replicates: 4000, oracle_steps: 2, oracle_runs: 500, threshold: 1.0}"

    _, result = run_diagnose(tmp_path, trajectories, data)

    comparison = result["trajectories"][0]["monte_carlo"]
    assert comparison["n"] == 49
    assert comparison["std_error"] > 0
    assert [o["counts"] for o in result["oracle"]] == [[1, 3], [2, 2], [3, 1]]


def test_diagnose_label_mismatch(tmp_path):
    trajectories = [z2_trajectory_file(10, 0, "seed-0.csv")]

    with pytest.raises(errors.InputError):
        run_diagnose(tmp_path, trajectories, "map: {kind: genotype, s: 0.2, t: 0.3}")


def test_diagnose_schedule_mismatch(tmp_path):
    trajectories = [z2_trajectory_file(5, 0, "seed-0.csv", schedule=engine.GrowthSchedule.geometric(2, 2.0))]

    with pytest.raises(errors.InputError, match="the schedule gives"):
        run_diagnose(tmp_path, trajectories)

    assert not (tmp_path / "seed-0.drift.csv").exists()


def test_diagnose_foreign_digest_warns(tmp_path, caplog):
    trajectories = [z2_trajectory_file(20, 0, "seed-0.csv")]

    run_diagnose(tmp_path, trajectories, "diagnose: {window: 20, verdict_window: 2, threshold: 1.0}")

    assert "different configuration" in caplog.text
