import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def write_prices(path, dates, columns: dict):
    lines = ["date," + ",".join(columns)]
    for k, d in enumerate(dates):
        lines.append(d + "," + ",".join("" if v[k] is None else repr(v[k]) for v in columns.values()))
    Path(path).write_text("\n".join(lines) + "\n")


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
