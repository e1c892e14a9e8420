"""Tests for the experiment commands and replay."""

import pytest
from bilinrank_experiments import read_csv, runs_path

from bilinrank_cli.main import app

HEADER = "# bilinrank-csv v1 experiment="


class TestSweepCommand:
    """Test the sweep command end-to-end"""

    def test_sweep_to_file(self, runner, sweep_config, tmp_path):
        out = tmp_path / "sweep.csv"
        result = runner.invoke(app, ["sweep", "--config", str(sweep_config), "--out", str(out)])
        assert result.exit_code == 0, result.output
        kind, rows = read_csv(out)
        assert kind == "sweep"
        assert len(rows) == 2 * 2
        assert [row["run_index"] for row in rows] == ["0", "0", "1", "1"]
        assert all(row["seconds"] == "0" for row in rows)

    def test_sweep_to_stdout(self, runner, sweep_config):
        result = runner.invoke(app, ["sweep", "--config", str(sweep_config), "--reps", "1"])
        assert result.exit_code == 0, result.output
        assert HEADER + "sweep" in result.output
        assert "run_index,seed,solver,mu,final_rank" in result.output

    def test_flags_override_config(self, runner, sweep_config, tmp_path):
        out = tmp_path / "sweep.csv"
        result = runner.invoke(
            app,
            ["sweep", "--config", str(sweep_config), "--mu-grid", "0.01,100", "--reps", "1",
             "--seed", "4", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        _, rows = read_csv(out)
        assert [row["mu"] for row in rows] == ["0.01", "100"]
        assert {row["run_index"] for row in rows} == {"0"}

    def test_sweep_requires_grid(self, runner):
        result = runner.invoke(app, ["sweep", "--reps", "1"])
        assert result.exit_code == 1
        assert "mu_grid" in result.output

    def test_bad_grid(self, runner):
        result = runner.invoke(app, ["sweep", "--mu-grid", "a,b"])
        assert result.exit_code == 1

    def test_kind_mismatch(self, runner, sweep_config):
        result = runner.invoke(app, ["table1", "--config", str(sweep_config)])
        assert result.exit_code == 1
        assert "'sweep'" in result.output


class TestTable1Command:
    """Test the table1 command"""

    def write_config(self, tmp_path, pattern, missing):
        path = tmp_path / "table1.yaml"
        path.write_text(
            "kind: table1\n"
            "master_seed: 3\n"
            "repetitions: 1\n"
            "record_timing: false\n"
            "mu: 1.0\n"
            "instance: {rows: 8, cols: 24, rank: 2, k: 4}\n"
            f"table1: {{patterns: [{pattern}], missing_levels: [{missing}], noise_levels: [0.0]}}\n"
            "varpro: {max_iters: 50}\n",
            encoding="utf-8",
        )
        return path

    def test_writes_summary_and_runs(self, runner, tmp_path):
        out = tmp_path / "table1.csv"
        config = self.write_config(tmp_path, "uniform", 0.0)
        result = runner.invoke(app, ["table1", "--config", str(config), "--out", str(out)])
        assert result.exit_code == 0, result.output
        kind, rows = read_csv(out)
        assert kind == "table1"
        assert rows[0]["runs"] == "1"
        assert runs_path(out).exists()

    def test_failed_runs_exit_2(self, runner, tmp_path):
        out = tmp_path / "table1.csv"
        config = self.write_config(tmp_path, "tracking", 0.9)
        result = runner.invoke(app, ["table1", "--config", str(config), "--out", str(out)])
        assert result.exit_code == 2
        assert "failed" in result.output
        _, rows = read_csv(runs_path(out))
        assert rows[0]["error"] != ""


class TestBiasCommand:
    """Test the bias command"""

    def test_bias_rows(self, runner, tmp_path):
        out = tmp_path / "bias.csv"
        metrics = tmp_path / "metrics.prom"
        result = runner.invoke(
            app, ["bias", "--seed", "5", "--out", str(out), "--metrics-out", str(metrics)]
        )
        assert result.exit_code == 0, result.output
        kind, rows = read_csv(out)
        assert kind == "bias"
        assert len(rows) == 4 * 10
        assert {row["seed"] for row in rows} == {rows[0]["seed"]}
        assert rows[0]["run_index"] == "0"
        assert metrics.exists()


class TestGeometricCommands:
    """Test the pose and nrsfm commands"""

    def test_pose(self, runner, tmp_path):
        config = tmp_path / "pose.yaml"
        config.write_text(
            "kind: pose\nrepetitions: 1\nrecord_timing: false\nmu_grid: [0.01]\n"
            "pose: {frames: 3, points: 10, k: 4}\nvarpro: {max_iters: 30}\n",
            encoding="utf-8",
        )
        out = tmp_path / "pose.csv"
        result = runner.invoke(
            app, ["pose", "--config", str(config), "--eta", "0.5", "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        _, rows = read_csv(out)
        assert [row["eta"] for row in rows] == ["0.5"]

    def test_nrsfm(self, runner, tmp_path):
        config = tmp_path / "nrsfm.yaml"
        config.write_text(
            "kind: nrsfm\nrepetitions: 1\nrecord_timing: false\nmu_grid: [0.01, 1000]\n"
            "nrsfm: {frames: 4, points: 6, basis: 1}\nvarpro: {max_iters: 30}\n",
            encoding="utf-8",
        )
        out = tmp_path / "nrsfm.csv"
        result = runner.invoke(
            app, ["nrsfm", "--config", str(config), "--k", "3", "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        _, rows = read_csv(out)
        assert len(rows) == 2


@pytest.mark.integration
class TestReplayCommand:
    """Test replaying stored runs"""

    def test_replay_matches(self, runner, sweep_config, tmp_path):
        out = tmp_path / "sweep.csv"
        runner.invoke(app, ["sweep", "--config", str(sweep_config), "--out", str(out)])
        result = runner.invoke(
            app, ["replay", str(out), "--config", str(sweep_config), "--run", "1"]
        )
        assert result.exit_code == 0, result.output
        assert "reproduced" in result.output

    def test_replay_detects_edits(self, runner, sweep_config, tmp_path):
        out = tmp_path / "sweep.csv"
        runner.invoke(app, ["sweep", "--config", str(sweep_config), "--out", str(out)])
        lines = out.read_text(encoding="utf-8").splitlines()
        fields = lines[2].split(",")
        fields[1] = "12345"  # seed of the first row
        lines[2] = ",".join(fields)
        out.write_text("\n".join(lines) + "\n", encoding="utf-8")

        result = runner.invoke(
            app, ["replay", str(out), "--config", str(sweep_config), "--run", "0"]
        )
        assert result.exit_code == 1
        assert "does not match" in result.output

    def test_replay_out_of_range(self, runner, sweep_config, tmp_path):
        out = tmp_path / "sweep.csv"
        runner.invoke(app, ["sweep", "--config", str(sweep_config), "--out", str(out)])
        result = runner.invoke(
            app, ["replay", str(out), "--config", str(sweep_config), "--run", "7"]
        )
        assert result.exit_code == 1

    def test_replay_bias(self, runner, tmp_path):
        config = tmp_path / "bias.yaml"
        config.write_text("kind: bias\nmaster_seed: 5\n", encoding="utf-8")
        out = tmp_path / "bias.csv"
        runner.invoke(app, ["bias", "--config", str(config), "--out", str(out)])
        result = runner.invoke(app, ["replay", str(out), "--config", str(config), "--run", "0"])
        assert result.exit_code == 0, result.output
        assert "reproduced (40 row(s))" in result.output

    def test_replay_rejects_summary(self, runner, tmp_path):
        config = tmp_path / "table1.yaml"
        config.write_text(
            "kind: table1\nrepetitions: 1\nrecord_timing: false\nmu: 1.0\n"
            "instance: {rows: 8, cols: 24, rank: 2, k: 4}\n"
            "table1: {patterns: [uniform], missing_levels: [0.0], noise_levels: [0.0]}\n"
            "varpro: {max_iters: 50}\n",
            encoding="utf-8",
        )
        out = tmp_path / "table1.csv"
        runner.invoke(app, ["table1", "--config", str(config), "--out", str(out)])

        result = runner.invoke(app, ["replay", str(out), "--config", str(config), "--run", "0"])
        assert result.exit_code == 1
        assert "aggregated" in result.output

        result = runner.invoke(
            app, ["replay", str(runs_path(out)), "--config", str(config), "--run", "0"]
        )
        assert result.exit_code == 0, result.output
