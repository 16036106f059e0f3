"""
Tests for the terminal loading indicator.
"""

from kpsolver.utils.loading_indicator import LoadingIndicator


class TestLoadingIndicator:
    """Tests for LoadingIndicator."""

    def test_disabled_never_starts(self):
        indicator = LoadingIndicator("Solving", enabled=False)
        with indicator:
            assert not indicator.running
            assert indicator.thread is None

    def test_stop_without_start(self, capsys):
        LoadingIndicator("Solving").stop()
        assert capsys.readouterr().out == ""

    def test_runs_and_clears(self, capsys):
        indicator = LoadingIndicator("Solving glm-cc", delay=0.01)
        with indicator:
            assert indicator.running
            assert indicator.thread.daemon
        assert not indicator.running
        assert not indicator.thread.is_alive()
        assert capsys.readouterr().out.endswith("\r")

    def test_start_twice_keeps_one_thread(self):
        indicator = LoadingIndicator("Solving", delay=0.01)
        indicator.start()
        thread = indicator.thread
        indicator.start()
        assert indicator.thread is thread
        indicator.stop()

    def test_shows_elapsed_seconds(self, capsys):
        with LoadingIndicator("Integrating", delay=0.01):
            pass
        out = capsys.readouterr().out
        assert "\rIntegrating" in out
        assert "0s" in out
