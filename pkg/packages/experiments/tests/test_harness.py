"""
Tests for the experiment harness and result files
"""

import numpy as np
import pytest
from bilinrank_common import DegenerateInstanceError, ValidationError
from bilinrank_core import singular_values, sv_prox
from bilinrank_schema import ExperimentSpec, PenaltyKind
from bilinrank_telemetry import REGISTRY

from bilinrank_experiments import (
    best_at_rank,
    derive_seed,
    harness,
    load_experiment,
    monotonicity_violations,
    plan_runs,
    read_csv,
    render_csv,
    replay,
    run_bias,
    run_experiment,
    run_nrsfm,
    run_pose,
    run_table1,
    solver_penalty,
    with_overrides,
    write_result,
)
from bilinrank_experiments.results import (
    NRSFM_COLUMNS,
    POSE_COLUMNS,
    RUN_COLUMNS,
    SWEEP_COLUMNS,
    format_value,
    runs_path,
)


def table1_spec(**kwargs):
    fields = {
        "kind": "table1",
        "master_seed": 3,
        "repetitions": 2,
        "record_timing": False,
        "mu": 1.0,
        "instance": {"rows": 8, "cols": 24, "rank": 2, "k": 4},
        "table1": {"patterns": ["uniform"], "missing_levels": [0.0], "noise_levels": [0.0]},
        "varpro": {"max_iters": 100},
        "admm": {"max_iters": 20, "match_varpro_time": False},
        "solvers": ["varpro", "admm_fmu"],
    }
    fields.update(kwargs)
    return ExperimentSpec(**fields)


class TestLoading:
    """Test experiment files and overrides"""

    def test_env_vars_expanded(self, write_spec, monkeypatch):
        monkeypatch.setenv("BILINRANK_TEST_REPS", "3")
        path = write_spec(
            "kind: sweep\nrepetitions: ${BILINRANK_TEST_REPS}\nmu_grid: [1.0, 10.0]\n"
        )
        spec = load_experiment(path)
        assert spec.kind == "sweep"
        assert spec.repetitions == 3
        assert spec.mu_grid == [1.0, 10.0]

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValidationError):
            load_experiment(tmp_path / "absent.yaml")

    def test_not_a_mapping(self, write_spec):
        with pytest.raises(ValidationError):
            load_experiment(write_spec("- table1\n- sweep\n"))

    def test_overrides(self, small_sweep):
        spec = with_overrides(small_sweep, {"instance.k": 6, "repetitions": None, "mu_grid": [2.0]})
        assert spec.instance.k == 6
        assert spec.repetitions == small_sweep.repetitions
        assert spec.mu_grid == [2.0]

    def test_overrides_are_validated(self, small_sweep):
        with pytest.raises(ValidationError):
            with_overrides(small_sweep, {"mu_grid": [-1.0]})


class TestPlanning:
    """Test run expansion and seeds"""

    def test_table1_grid(self):
        spec = table1_spec(
            table1={"patterns": ["uniform", "tracking"], "missing_levels": [0.0, 0.2], "noise_levels": [0.0]}
        )
        tasks = plan_runs(spec)
        assert len(tasks) == 2 * 2 * 1 * 2
        assert [t.run_index for t in tasks] == list(range(8))
        assert tasks[5].seed == derive_seed(3, 5)
        assert tasks[0].params == {"pattern": "uniform", "noise": 0.0, "missing": 0.0}
        assert tasks[-1].params["pattern"] == "tracking"

    def test_sweep_runs_per_repetition(self, small_sweep):
        tasks = plan_runs(small_sweep)
        assert len(tasks) == small_sweep.repetitions
        assert tasks[1].seed == derive_seed(small_sweep.master_seed, 1)

    def test_solver_penalties(self):
        assert solver_penalty("varpro", 4.0).kind == PenaltyKind.FMU
        assert solver_penalty("admm_rank", 4.0).kind == PenaltyKind.RANK
        assert solver_penalty("admm_nuclear", 4.0).mu == pytest.approx(2.0)
        with pytest.raises(ValidationError):
            solver_penalty("svt", 1.0)

    def test_nuclear_baseline_threshold(self):
        X = np.diag([3.0, 1.5, 0.5])
        nuclear = singular_values(sv_prox(solver_penalty("admm_nuclear", 4.0), X))
        fmu = singular_values(sv_prox(solver_penalty("varpro", 4.0), X))
        # soft threshold at sqrt(mu) / 2 = 1, hard threshold at sqrt(mu) = 2
        np.testing.assert_allclose(nuclear, [2.0, 0.5, 0.0], atol=1e-12)
        np.testing.assert_allclose(fmu, [3.0, 0.0, 0.0], atol=1e-12)


class TestTable1:
    """Test the distance-to-ground-truth table"""

    def test_rows_and_summary(self):
        result = run_table1(table1_spec())
        assert result.failures == 0
        assert len(result.runs) == 4
        assert [row["solver"] for row in result.runs] == ["varpro", "admm_fmu"] * 2
        assert len(result.rows) == 2
        summary = {row["solver"]: row for row in result.rows}
        assert summary["varpro"]["runs"] == 2
        assert summary["varpro"]["mean_seconds"] == 0.0
        assert summary["varpro"]["mean_dist"] <= 1e-4

    def test_generation_failures_are_recorded(self):
        spec = table1_spec(
            table1={"patterns": ["tracking"], "missing_levels": [0.9], "noise_levels": [0.0]}
        )
        result = run_table1(spec)
        code = result.runs[0]["error"]
        assert code
        before = REGISTRY.get_sample_value(
            "bilinrank_run_failures_total", {"experiment": "table1", "code": code}
        )
        result = run_table1(spec)
        after = REGISTRY.get_sample_value(
            "bilinrank_run_failures_total", {"experiment": "table1", "code": code}
        )
        assert result.failures == 4
        assert after - before == 4
        assert result.rows[0]["failures"] == 2
        assert result.rows[0]["mean_dist"] is None

    def test_wrong_kind(self, small_sweep):
        with pytest.raises(ValidationError):
            run_table1(small_sweep)


class TestSweep:
    """Test the rank-vs-datafit sweep"""

    def test_rows_in_run_order(self, small_sweep):
        result = run_experiment(small_sweep)
        assert result.columns == SWEEP_COLUMNS
        assert len(result.rows) == 2 * 3
        assert [row["run_index"] for row in result.rows] == [0, 0, 0, 1, 1, 1]
        assert [row["mu"] for row in result.rows[:3]] == small_sweep.mu_grid
        for row in result.rows:
            assert row["error"] is None
            assert row["seconds"] == 0.0
            assert row["datafit"] >= 0.0
            assert row["certified"] in (True, False)

    def test_output_is_reproducible(self, small_sweep):
        first = run_experiment(small_sweep)
        second = run_experiment(small_sweep)
        assert render_csv("sweep", first.columns, first.rows) == render_csv(
            "sweep", second.columns, second.rows
        )

    def test_replay_matches_stored_rows(self, small_sweep):
        result = run_experiment(small_sweep)
        replayed = replay(small_sweep, 1)
        assert replayed == [row for row in result.rows if row["run_index"] == 1]

    def test_replay_out_of_range(self, small_sweep):
        with pytest.raises(ValidationError):
            replay(small_sweep, 2)

    def test_nuclear_rows_have_no_certificate(self, small_sweep):
        spec = with_overrides(
            small_sweep,
            {"solvers": ["varpro", "admm_nuclear"], "repetitions": 1, "admm.max_iters": 10},
        )
        rows = run_experiment(spec).rows
        assert {row["solver"] for row in rows} == {"varpro", "admm_nuclear"}
        assert all(row["certified"] is None for row in rows if row["solver"] == "admm_nuclear")


class TestBias:
    """Test the singular-value bias comparison"""

    @pytest.fixture
    def rows(self):
        return run_bias(ExperimentSpec(kind="bias", master_seed=5)).rows

    def by_kind(self, rows, prefix):
        return [row for row in rows if row["regularizer"].startswith(prefix)]

    def test_row_count(self, rows):
        assert len(rows) == 4 * 10
        assert [row["index"] for row in rows[:10]] == list(range(1, 11))

    def test_fmu_keeps_large_values(self, rows):
        for row in self.by_kind(rows, "fmu")[:5]:
            assert row["sigma_prox"] == pytest.approx(row["sigma_x0"], abs=1e-11)

    def test_nuclear_shifts_large_values(self, rows):
        for row in self.by_kind(rows, "nuclear")[:5]:
            assert row["sigma_prox"] == pytest.approx(row["sigma_x0"] - row["weight"] / 2, abs=1e-10)

    def test_small_values_suppressed(self, rows):
        for i in range(4):
            block = rows[10 * i : 10 * (i + 1)]
            assert all(row["sigma_prox"] <= 1e-10 for row in block[5:])
            assert all(row["sigma_prox"] > 0 for row in block[:5])


def pose_spec(**kwargs):
    fields = {
        "kind": "pose",
        "repetitions": 1,
        "record_timing": False,
        "mu_grid": [1e-2],
        "pose": {"frames": 3, "points": 10, "etas": [0.5, 1.0], "k": 4},
        "varpro": {"max_iters": 30},
    }
    fields.update(kwargs)
    return ExperimentSpec(**fields)


def nrsfm_spec(**kwargs):
    fields = {
        "kind": "nrsfm",
        "repetitions": 1,
        "record_timing": False,
        "mu_grid": [1e-2, 1e3],
        "nrsfm": {"frames": 4, "points": 6, "basis": 1, "k": 3},
        "varpro": {"max_iters": 30},
    }
    fields.update(kwargs)
    return ExperimentSpec(**fields)


class TestGeometricSweeps:
    """Test the pOSE and non-rigid sweeps"""

    def test_pose_rows(self):
        result = run_pose(pose_spec())
        assert result.columns == POSE_COLUMNS
        assert [row["eta"] for row in result.rows] == [0.5, 1.0]
        for row in result.rows:
            assert row["solver"] == "varpro"
            assert row["error"] is None
            assert np.isfinite(row["ose_rms"])
            assert np.isfinite(row["affine_rms"])

    def test_nrsfm_rows(self):
        result = run_nrsfm(nrsfm_spec())
        assert result.columns == NRSFM_COLUMNS
        assert len(result.rows) == 2
        assert all(row["shape_dist"] >= 0 for row in result.rows)

    def test_pose_with_admm_baselines(self):
        spec = pose_spec(
            pose={"frames": 3, "points": 10, "etas": [0.5], "k": 4},
            solvers=["admm_nuclear", "admm_fmu", "varpro"],
            admm={"max_iters": 20, "match_varpro_time": False},
        )
        rows = run_pose(spec).rows
        assert [row["solver"] for row in rows] == ["varpro", "admm_nuclear", "admm_fmu"]
        for row in rows:
            assert row["error"] is None
            assert row["final_rank"] >= 0
            assert np.isfinite(row["ose_rms"])
        assert rows[1]["certified"] is None
        assert rows[2]["certified"] in (True, False)

    def test_nrsfm_with_admm_baselines(self):
        spec = nrsfm_spec(
            mu_grid=[1e-2],
            solvers=["varpro", "admm_fmu"],
            admm={"max_iters": 20},
        )
        rows = run_nrsfm(spec).rows
        assert [row["solver"] for row in rows] == ["varpro", "admm_fmu"]
        assert all(row["error"] is None for row in rows)
        assert all(row["shape_dist"] >= 0 for row in rows)

    def test_nrsfm_scene_failure_is_a_row(self, monkeypatch):
        def degenerate(*args, **kwargs):
            raise DegenerateInstanceError("cameras are degenerate")

        monkeypatch.setattr(harness, "gen_nrsfm_scene", degenerate)
        result = run_nrsfm(nrsfm_spec(repetitions=2, solvers=["varpro", "admm_fmu"]))
        assert result.failures == 2 * 2 * 2
        assert [row["run_index"] for row in result.rows] == [0] * 4 + [1] * 4
        assert {row["error"] for row in result.rows} == {"DEGENERATE_INSTANCE"}
        assert [row["solver"] for row in result.rows[:2]] == ["varpro", "admm_fmu"]


class TestRunSeeds:
    """Every result row carries the seed of the run that produced it"""

    @pytest.mark.parametrize(
        "spec",
        [
            table1_spec(repetitions=1, solvers=["varpro"]),
            ExperimentSpec(
                kind="sweep",
                master_seed=4,
                repetitions=2,
                record_timing=False,
                instance={"rows": 8, "cols": 24, "rank": 2, "k": 4},
                mu_grid=[1.0],
                varpro={"max_iters": 20},
            ),
            ExperimentSpec(kind="bias", master_seed=4),
            pose_spec(master_seed=4, repetitions=2),
            nrsfm_spec(master_seed=4, repetitions=2),
        ],
        ids=["table1", "sweep", "bias", "pose", "nrsfm"],
    )
    def test_rows_carry_seed(self, spec):
        result = run_experiment(spec)
        rows = result.runs if spec.kind == "table1" else result.rows
        assert "seed" in RUN_COLUMNS[spec.kind]
        assert rows
        for row in rows:
            assert row["seed"] == derive_seed(spec.master_seed, row["run_index"])

    def test_bias_replay(self):
        spec = ExperimentSpec(kind="bias", master_seed=5)
        assert replay(spec, 0) == run_bias(spec).rows


class TestResults:
    """Test result files and row selection"""

    def test_value_formatting(self):
        assert format_value(0.1) == "0.10000000000000001"
        assert format_value(True) == "true"
        assert format_value(None) == ""
        assert format_value(3) == "3"

    def test_table1_writes_runs_file(self, tmp_path):
        result = run_table1(table1_spec(repetitions=1, solvers=["varpro"]))
        paths = write_result(result, tmp_path / "table1.csv")
        assert paths == [tmp_path / "table1.csv", runs_path(tmp_path / "table1.csv")]
        first = paths[0].read_text(encoding="utf-8").splitlines()[0]
        assert first == "# bilinrank-csv v1 experiment=table1"
        kind, rows = read_csv(paths[1])
        assert kind == "table1"
        assert rows[0]["solver"] == "varpro"
        assert rows[0]["seed"] == str(derive_seed(3, 0))

    def test_read_rejects_plain_csv(self, tmp_path):
        path = tmp_path / "plain.csv"
        path.write_text("a,b\n1,2\n", encoding="utf-8")
        with pytest.raises(ValidationError):
            read_csv(path)

    def test_best_at_rank(self):
        rows = [
            {"final_rank": 4, "datafit": 0.5, "error": None},
            {"final_rank": 4, "datafit": 0.1, "error": None},
            {"final_rank": 3, "datafit": 0.01, "error": None},
            {"final_rank": None, "datafit": None, "error": "NUMERICAL_ERROR"},
        ]
        assert best_at_rank(rows, 4)["datafit"] == 0.1
        assert best_at_rank(rows, 2) is None

    def test_monotonicity_violations(self):
        rows = [
            {"run_index": 0, "mu": 1.0, "final_rank": 4},
            {"run_index": 0, "mu": 10.0, "final_rank": 5},
            {"run_index": 0, "mu": 100.0, "final_rank": 1},
            {"run_index": 1, "mu": 1.0, "final_rank": 3, "error": "X"},
        ]
        messages = monotonicity_violations(rows, ("run_index",))
        assert len(messages) == 1
        assert "run_index=0" in messages[0]


@pytest.mark.slow
class TestReproduction:
    """Desk-scale versions of the recovery experiments"""

    def test_noiseless_sweep_recovers_rank(self):
        spec = ExperimentSpec(
            kind="sweep",
            master_seed=1,
            repetitions=1,
            instance={"rows": 32, "cols": 128, "rank": 4, "k": 8, "missing": 0.2},
            mu_grid=[1.0],
        )
        best = best_at_rank(run_experiment(spec).rows, 4)
        assert best is not None
        assert best["datafit"] <= 1e-8
        assert best["certified"] is True

    def test_uniform_table1_row(self):
        spec = ExperimentSpec(
            kind="table1",
            master_seed=2,
            repetitions=2,
            table1={"patterns": ["uniform"], "missing_levels": [0.3], "noise_levels": [0.0]},
        )
        (row,) = run_table1(spec).rows
        assert row["failures"] == 0
        assert row["mean_dist"] <= 1e-3

    def test_workers_do_not_change_output(self, small_sweep):
        serial = run_experiment(small_sweep)
        parallel = run_experiment(with_overrides(small_sweep, {"workers": 2}))
        assert render_csv("sweep", serial.columns, serial.rows) == render_csv(
            "sweep", parallel.columns, parallel.rows
        )

    def test_tracking_table1_rows(self):
        bounds = {0.1: 0.12, 0.5: 0.30}
        spec = ExperimentSpec(
            kind="table1",
            repetitions=4,
            table1={"patterns": ["tracking"], "missing_levels": [0.1, 0.5], "noise_levels": [0.0]},
        )
        rows = run_table1(spec).rows
        assert [row["missing"] for row in rows] == [0.1, 0.5]
        for row in rows:
            assert row["failures"] == 0
            assert row["mean_dist"] <= bounds[row["missing"]]

    def test_noisy_table1_row(self):
        spec = ExperimentSpec(
            kind="table1",
            repetitions=4,
            table1={"patterns": ["tracking"], "missing_levels": [0.0], "noise_levels": [0.1]},
        )
        (row,) = run_table1(spec).rows
        assert row["failures"] == 0
        assert row["mean_dist"] <= 0.03


def exact_recoveries(rows, rank):
    return sum(
        1
        for row in rows
        if not row["error"] and row["final_rank"] == rank and row["datafit"] <= 1e-8
    )


@pytest.mark.slow
class TestGeometricRecovery:
    """Noiseless scenes are fitted exactly at the ground-truth rank"""

    def test_pose_recovery(self):
        spec = ExperimentSpec(
            kind="pose",
            repetitions=10,
            mu_grid=[1e-2],
            pose={"frames": 10, "points": 50, "etas": [0.5], "k": 8},
        )
        rows = run_pose(spec).rows
        assert len(rows) == 10
        assert exact_recoveries(rows, 4) >= 8

    def test_nrsfm_recovery(self):
        spec = ExperimentSpec(
            kind="nrsfm",
            repetitions=10,
            mu_grid=[1e-2],
            nrsfm={"frames": 20, "points": 30, "basis": 2, "k": 8},
        )
        rows = run_nrsfm(spec).rows
        assert len(rows) == 10
        assert exact_recoveries(rows, 2) >= 8
