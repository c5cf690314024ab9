import contextlib
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

CRITERIA = {}


@contextlib.contextmanager
def criterion(number, title):
    """Record a PASS/FAIL line for one acceptance criterion."""
    detail = {"text": ""}
    try:
        yield detail
    except BaseException:
        CRITERIA[number] = ("FAIL", title, detail["text"])
        raise
    CRITERIA[number] = ("PASS", title, detail["text"])


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        status, title, text = CRITERIA[number]
        suffix = f" [{text}]" if text else ""
        terminalreporter.write_line(f"criterion {number:2d} {status}: {title}{suffix}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
