"""
Terminal spinner shown while a grid sweep or time integration runs.
"""

import sys
import threading
import time
from typing import Optional

FRAMES = (".  ", ".. ", "...")


class LoadingIndicator:
    """
    Dots and elapsed seconds after a message, redrawn from a daemon thread.

    Usable as a context manager:

        with LoadingIndicator("Solving glm-cc", enabled=not args.debug):
            field = solve_glm_grid(...)
    """

    def __init__(self, message: str = "Working", delay: float = 0.2, enabled: bool = True):
        self.message = message
        self.delay = delay
        self.enabled = enabled
        self.thread: Optional[threading.Thread] = None
        self._stop = threading.Event()
        self._started_at = 0.0
        self._width = 0

    @property
    def running(self) -> bool:
        return self.thread is not None and not self._stop.is_set()

    def start(self) -> None:
        if not self.enabled or self.running:
            return
        self._stop.clear()
        self._started_at = time.monotonic()
        self.thread = threading.Thread(target=self._animate, daemon=True)
        self.thread.start()

    def stop(self) -> None:
        if not self.running:
            return
        self._stop.set()
        assert self.thread is not None
        self.thread.join()
        sys.stdout.write("\r" + " " * self._width + "\r")
        sys.stdout.flush()

    def __enter__(self) -> "LoadingIndicator":
        self.start()
        return self

    def __exit__(self, *exc) -> None:
        self.stop()

    def _animate(self) -> None:
        frame = 0
        while not self._stop.is_set():
            elapsed = time.monotonic() - self._started_at
            line = f"{self.message}{FRAMES[frame % len(FRAMES)]} {elapsed:.0f}s"
            self._width = max(self._width, len(line))
            sys.stdout.write("\r" + line)
            sys.stdout.flush()
            frame += 1
            self._stop.wait(self.delay)
