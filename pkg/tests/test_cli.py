"""Command-line driver: artifacts, determinism, exit codes."""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from tampernet.cli import main, read_frontier_csv
from tampernet.network import Cell, ConflictGroup, Connector, RoadNetwork


@pytest.fixture
def runner():
    return CliRunner()


def write_toy_scenario(tmp_path: Path, rate: float = 600.0,
                       steps: int = 6) -> Path:
    cells = [
        Cell("ra", "source", 5, 1), Cell("a", "ordinary", 2, 1),
        Cell("sa", "sink", 1, 1),
        Cell("rb", "source", 5, 1), Cell("b", "ordinary", 2, 1),
        Cell("sb", "sink", 1, 1),
    ]
    net = RoadNetwork.build(
        cells,
        [Connector("raa", "ra", "a", 1), Connector("rbb", "rb", "b", 1)],
        conflict_groups=[ConflictGroup("x", (("a", "sa"), ("b", "sb")))],
    )
    (tmp_path / "toy-network.json").write_text(net.to_json())
    scenario = {
        "network": {"kind": "file", "path": "toy-network.json"},
        "horizon_steps": steps,
        "demand_rate_veh_hr": rate,
        "label": "toy",
    }
    path = tmp_path / "toy-scenario.json"
    path.write_text(json.dumps(scenario))
    return path


class TestGenerate:
    def test_generate_grid_artifacts(self, runner, tmp_path):
        result = runner.invoke(main, ["generate", "--kind", "A",
                                      "--horizon", "20",
                                      "--out", str(tmp_path / "o")])
        assert result.exit_code == 0, result.output
        out = tmp_path / "o"
        manifest = json.loads((out / "manifest.json").read_text())
        assert set(manifest["artifacts"]) == {
            "network.json", "scenario.json", "network-summary.json"
        }
        assert (out / "network.json").exists()

    def test_generate_d_requires_seed(self, runner, tmp_path):
        result = runner.invoke(main, ["generate", "--kind", "D",
                                      "--out", str(tmp_path / "o")])
        assert result.exit_code == 2


class TestExpandAndSolve:
    def test_expand_stats(self, runner, tmp_path):
        scenario = write_toy_scenario(tmp_path)
        result = runner.invoke(main, ["expand", "--scenario", str(scenario),
                                      "--out", str(tmp_path / "o")])
        assert result.exit_code == 0, result.output
        stats = json.loads(
            (tmp_path / "o" / "supergraph-stats.json").read_text()
        )
        assert stats["horizon_steps"] == 6
        assert stats["arc_classes"]["conflict"] == 6

    def test_solve_optimal_artifacts(self, runner, tmp_path):
        scenario = write_toy_scenario(tmp_path)
        result = runner.invoke(main, ["solve-optimal",
                                      "--scenario", str(scenario),
                                      "--out", str(tmp_path / "o")])
        assert result.exit_code == 0, result.output
        metrics = json.loads((tmp_path / "o" / "metrics.json").read_text())
        assert metrics["vehicles_exited"] >= 1
        schedule = (tmp_path / "o" / "schedule.csv").read_text()
        assert schedule.startswith("group_id,t,granted_movement\n")

    def test_missing_scenario_exits_2(self, runner, tmp_path):
        result = runner.invoke(main, ["expand", "--scenario", "nope.json",
                                      "--out", str(tmp_path / "o")])
        assert result.exit_code == 2


class TestAttack:
    def test_frontier_with_oracle_check(self, runner, tmp_path):
        scenario = write_toy_scenario(tmp_path, rate=600.0)
        result = runner.invoke(main, ["attack", "--scenario", str(scenario),
                                      "--oracle-check",
                                      "--out", str(tmp_path / "o")])
        assert result.exit_code == 0, result.output
        manifest = json.loads(
            (tmp_path / "o" / "manifest.json").read_text()
        )
        assert manifest["oracle_check"]["ran"]
        assert manifest["oracle_check"]["agrees"]
        pairs = read_frontier_csv(tmp_path / "o" / "frontier.csv")
        assert pairs
        witnesses = list((tmp_path / "o").glob("witness-*.txt"))
        assert len(witnesses) == len(pairs)

    def test_reexport_is_byte_identical(self, runner, tmp_path):
        scenario = write_toy_scenario(tmp_path)
        for name in ("o1", "o2"):
            result = runner.invoke(
                main, ["attack", "--scenario", str(scenario),
                       "--out", str(tmp_path / name)]
            )
            assert result.exit_code == 0, result.output
        a = (tmp_path / "o1" / "frontier.csv").read_bytes()
        b = (tmp_path / "o2" / "frontier.csv").read_bytes()
        assert a == b


class TestVuln:
    def test_reports_from_frontier_csv(self, runner, tmp_path):
        frontier = tmp_path / "toy.frontier.csv"
        frontier.write_text(
            "z2,z1,abs_z1,witness_id\n0,0,0,w000\n5,-10,10,w001\n"
        )
        result = runner.invoke(main, ["vuln", str(frontier),
                                      "--out", str(tmp_path / "o")])
        assert result.exit_code == 0, result.output
        text = (tmp_path / "o" / "vulnerability.csv").read_text()
        lines = text.strip().split("\n")
        assert lines[0] == "label,m,concavity_index,n_points,z1_max,z2_max"
        assert lines[1] == "toy,1,0.5,2,10,5"

    def test_malformed_frontier_exits_2(self, runner, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        result = runner.invoke(main, ["vuln", str(bad),
                                      "--out", str(tmp_path / "o")])
        assert result.exit_code == 2


class TestSweep:
    def test_single_cell_sweep(self, runner, tmp_path):
        result = runner.invoke(main, ["sweep", "--networks", "A",
                                      "--demands", "400",
                                      "--durations", "20",
                                      "--out", str(tmp_path / "o")])
        assert result.exit_code == 0, result.output
        files = sorted(p.name for p in (tmp_path / "o").glob("*.csv"))
        assert "A-r400-T20.frontier.csv" in files
        assert "vulnerability.csv" in files

    def test_unknown_network_exits_2(self, runner, tmp_path):
        result = runner.invoke(main, ["sweep", "--networks", "Q",
                                      "--out", str(tmp_path / "o")])
        assert result.exit_code == 2


class TestEnvironmentDefaults:
    def test_out_envvar_respected(self, runner, tmp_path, monkeypatch):
        scenario = write_toy_scenario(tmp_path)
        monkeypatch.setenv("TAMPERNET_OUT", str(tmp_path / "envout"))
        result = runner.invoke(main, ["expand", "--scenario", str(scenario)])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "envout" / "supergraph-stats.json").exists()
