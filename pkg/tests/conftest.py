import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_LINES = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """Append one formatted result line per acceptance criterion."""
    lines = request.config.stash.setdefault(_LINES, [])

    def record(k, ok, **values):
        detail = " ".join(f"{key}={val:.6g}" if isinstance(val, float) else f"{key}={val}"
                          for key, val in values.items())
        line = f"[acceptance {k:>2}] {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip("]"))):
            terminalreporter.write_line(line)
