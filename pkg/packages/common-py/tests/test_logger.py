"""
Tests for the logger module
"""

import json

from bilinrank_common.logger import (
    clear_run_id,
    configure_logging,
    get_logger,
    get_run_id,
    set_run_id,
)


def _records(err: str) -> list:
    return [json.loads(line) for line in err.splitlines() if line.strip()]


class TestLogger:
    """Test BilinrankLogger"""

    def test_get_logger(self):
        """Test get_logger creates a logger"""
        logger = get_logger("test.component")
        assert logger.component == "test.component"
        assert logger.context == {}

    def test_info_is_json_on_stderr(self, capsys):
        """Records are single JSON objects written to stderr, never stdout"""
        logger = get_logger("test.json")
        logger.info("Solve finished", iterations=12)
        captured = capsys.readouterr()
        assert captured.out == ""
        (record,) = _records(captured.err)
        assert record["level"] == "INFO"
        assert record["component"] == "test.json"
        assert record["message"] == "Solve finished"
        assert record["iterations"] == 12
        assert record["timestamp"].endswith("Z")

    def test_debug_suppressed_at_info(self, capsys):
        """DEBUG records are dropped at the default level"""
        logger = get_logger("test.levels")
        logger.debug("Step accepted")
        assert capsys.readouterr().err == ""
        assert not logger.is_debug()

    def test_debug_level(self, capsys):
        """DEBUG records appear when requested"""
        logger = get_logger("test.debug", log_level="DEBUG")
        logger.debug("Step accepted", damping=0.01)
        (record,) = _records(capsys.readouterr().err)
        assert record["level"] == "DEBUG"
        assert record["damping"] == 0.01

    def test_warning_alias(self, capsys):
        """warn() is an alias of warning()"""
        logger = get_logger("test.warn")
        logger.warning("first")
        logger.warn("second")
        records = _records(capsys.readouterr().err)
        assert [r["level"] for r in records] == ["WARNING", "WARNING"]

    def test_with_context(self, capsys):
        """Test logger with persistent context"""
        logger = get_logger("test.context")
        run_logger = logger.with_context(seed=7, solver="varpro")
        assert logger.context == {}
        assert run_logger.context == {"seed": 7, "solver": "varpro"}

        run_logger.info("Run started", extra_key=1)
        (record,) = _records(capsys.readouterr().err)
        assert record["seed"] == 7
        assert record["solver"] == "varpro"
        assert record["extra_key"] == 1

    def test_exception_includes_trace(self, capsys):
        """exception() attaches the formatted traceback"""
        logger = get_logger("test.exception")
        try:
            raise RuntimeError("boom")
        except RuntimeError:
            logger.exception("Solve failed")
        (record,) = _records(capsys.readouterr().err)
        assert "RuntimeError: boom" in record["exception"]

    def test_configure_logging_changes_existing(self, capsys):
        """configure_logging sets the level of loggers created earlier"""
        logger = get_logger("test.configure")
        configure_logging("ERROR")
        try:
            logger.warning("hidden")
            assert capsys.readouterr().err == ""
        finally:
            configure_logging("INFO")


class TestRunId:
    """Test run ID context functions"""

    def test_set_and_get(self):
        set_run_id("table1-3")
        assert get_run_id() == "table1-3"
        clear_run_id()
        assert get_run_id() is None

    def test_run_id_stamped_on_records(self, capsys):
        """The current run ID appears on every record"""
        logger = get_logger("test.runid")
        set_run_id("sweep-9")
        try:
            logger.info("Run finished")
        finally:
            clear_run_id()
        (record,) = _records(capsys.readouterr().err)
        assert record["run_id"] == "sweep-9"
