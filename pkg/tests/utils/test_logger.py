"""
Test Suite for Logger Module

Unit tests for the logging setup of kpsolver: console levels selected by the
debug/verbose/quiet flags, the optional file handler, the fallback when the
log file cannot be opened, and the context-prefixing LoggerAdapter.

Key Testing Objectives:
- Validate console handler levels per flag
- Test file handler creation and directory handling
- Verify the stderr fallback on unwritable log files
- Check the "[key=value]" prefixes of LoggerAdapter
"""

import logging
from unittest.mock import MagicMock, patch

import pytest

from kpsolver.utils.logger import (
    PACKAGE_LOGGER,
    LoggerAdapter,
    setup_logger,
)


def _args(debug=False, verbose=False, quiet=False, log_file=None):
    args = MagicMock()
    args.debug = debug
    args.verbose = verbose
    args.quiet = quiet
    args.log_file = log_file
    return args


@pytest.fixture
def patched_logging():
    """Patch getLogger and the handler classes, yielding the mocks."""
    with (
        patch("logging.getLogger") as mock_get_logger,
        patch("logging.StreamHandler") as mock_stream_handler,
        patch("logging.FileHandler") as mock_file_handler,
    ):
        mock_logger = MagicMock(spec=logging.Logger)
        mock_logger.handlers = []
        mock_get_logger.return_value = mock_logger
        yield mock_get_logger, mock_logger, mock_stream_handler, mock_file_handler


class TestSetupLogger:
    """Tests for setup_logger."""

    def test_basic_setup(self, patched_logging):
        mock_get_logger, mock_logger, mock_stream_handler, mock_file_handler = patched_logging
        console = mock_stream_handler.return_value

        logger = setup_logger(app_name=PACKAGE_LOGGER, args=_args())

        assert logger == mock_logger
        mock_get_logger.assert_called_with(PACKAGE_LOGGER)
        mock_logger.setLevel.assert_called_once_with(logging.DEBUG)
        console.setLevel.assert_called_once_with(logging.WARNING)
        mock_logger.addHandler.assert_called_with(console)
        mock_file_handler.assert_not_called()

    @pytest.mark.parametrize(
        "flags, level",
        [({"debug": True}, logging.DEBUG), ({"verbose": True}, logging.INFO)],
    )
    def test_console_levels(self, patched_logging, flags, level):
        _, _, mock_stream_handler, _ = patched_logging
        setup_logger(app_name="testapp", args=_args(**flags))
        mock_stream_handler.return_value.setLevel.assert_called_once_with(level)

    def test_default_level_argument(self, patched_logging):
        _, _, mock_stream_handler, _ = patched_logging
        setup_logger(app_name="testapp", args=_args(), default_level="ERROR")
        mock_stream_handler.return_value.setLevel.assert_called_once_with(logging.ERROR)

    def test_quiet_mode(self, patched_logging):
        _, _, mock_stream_handler, mock_file_handler = patched_logging
        setup_logger(app_name="testapp", args=_args(quiet=True))
        mock_stream_handler.assert_not_called()
        mock_file_handler.assert_not_called()

    def test_existing_handlers_removed(self, patched_logging):
        _, mock_logger, _, _ = patched_logging
        old = MagicMock()
        mock_logger.handlers = [old]
        setup_logger(app_name="testapp", args=_args(quiet=True))
        mock_logger.removeHandler.assert_called_once_with(old)

    @patch("os.makedirs")
    def test_file_logging(self, mock_makedirs, patched_logging):
        _, mock_logger, _, mock_file_handler = patched_logging
        setup_logger(app_name="testapp", args=_args(log_file="/path/to/log/kpsolve.log"))
        mock_makedirs.assert_called_once_with("/path/to/log", exist_ok=True)
        mock_file_handler.assert_called_once_with("/path/to/log/kpsolve.log")
        mock_file_handler.return_value.setLevel.assert_called_once_with(logging.DEBUG)
        mock_logger.addHandler.assert_called_with(mock_file_handler.return_value)

    @patch("os.makedirs")
    def test_file_in_current_directory(self, mock_makedirs, patched_logging):
        setup_logger(app_name="testapp", args=_args(log_file="kpsolve.log"))
        mock_makedirs.assert_not_called()

    def test_file_logging_error(self, patched_logging):
        _, mock_logger, mock_stream_handler, mock_file_handler = patched_logging
        mock_file_handler.side_effect = PermissionError("Permission denied")

        setup_logger(app_name="testapp", args=_args(log_file="kpsolve.log"))

        # console handler plus the stderr fallback
        assert mock_stream_handler.call_count == 2
        mock_logger.error.assert_called_once()
        assert "Permission denied" in mock_logger.error.call_args[0][0]


class TestAdapter:
    """Tests for LoggerAdapter."""

    def test_adapter_prefix(self):
        adapter = LoggerAdapter(logging.getLogger("kpsolver.test"), {"method": "glm-cc", "M": 64})
        msg, kwargs = adapter.process("done", {})
        assert msg == "[method=glm-cc] [M=64] done"
        assert kwargs == {}

    def test_adapter_emits(self, caplog):
        adapter = LoggerAdapter(logging.getLogger("kpsolver.test_emit"), {"M": 8})
        with caplog.at_level(logging.INFO, logger="kpsolver.test_emit"):
            adapter.info("reference ready")
        assert "[M=8] reference ready" in caplog.text
