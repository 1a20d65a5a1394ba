import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

SAMPLE_LOG = """Timestamp\tX\tY\tButton Touch\tWidth Major\tOrientation\tPressure\tFinger
0\t984\t467\tHELD\t19\t13\t20\t0
0.00818\t986\t468\tHELD\t18\t21\t23\t0
0.01702\t988\t469\tHELD\t18\t14\t21\t0
0.024978\t991\t470\tHELD\t19\t15\t22\t1
0.033448\t992\t471\tHELD\t19\t12\t22\t0
0.0416\t994\t473\tHELD\t18\t16\t20\t1
0.050166\t992\t475\tHELD\t19\t18\t19\t0
0.05832\t991\t476\tHELD\t18\t20\t21\t1
0.067227\t992\t478\tHELD\t18\t17\t20\t0
0.083833\t995\t480\tHELD\t19\t16\t22\t0
"""

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def sample_lines():
    return SAMPLE_LOG.splitlines()


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
