"""Tests for the telemetry package."""

from bilinrank_telemetry import observe_failure, observe_solve, render_metrics, write_metrics


class TestObserveSolve:
    """Test solve counters and histograms"""

    def test_counts_by_solver_and_termination(self, sample):
        before = sample("bilinrank_solves_total", solver="varpro", termination="converged_obj")
        observe_solve("varpro", "converged_obj", 0.2, 12)
        observe_solve("varpro", "converged_obj", 0.3, 40)
        after = sample("bilinrank_solves_total", solver="varpro", termination="converged_obj")
        assert after - before == 2

    def test_histograms_record_observations(self, sample):
        count_before = sample("bilinrank_solve_seconds_count", solver="admm")
        sum_before = sample("bilinrank_solve_iterations_sum", solver="admm")
        observe_solve("admm", "max_iters", 1.5, 500)
        assert sample("bilinrank_solve_seconds_count", solver="admm") - count_before == 1
        assert sample("bilinrank_solve_iterations_sum", solver="admm") - sum_before == 500


class TestObserveFailure:
    """Test per-run failure counters"""

    def test_counts_by_code(self, sample):
        before = sample("bilinrank_run_failures_total", experiment="table1", code="DIVERGENCE")
        observe_failure("table1", "DIVERGENCE")
        assert sample("bilinrank_run_failures_total", experiment="table1", code="DIVERGENCE") - before == 1


class TestRender:
    """Test the text exposition"""

    def test_contains_metric_families(self):
        observe_solve("varpro", "max_iters", 0.1, 3)
        text = render_metrics()
        assert "# TYPE bilinrank_solves_total counter" in text
        assert "bilinrank_solve_seconds_bucket" in text
        assert 'solver="varpro"' in text

    def test_write_metrics(self, tmp_path):
        path = write_metrics(tmp_path / "out" / "metrics.prom")
        assert path.read_text().startswith("# HELP")
