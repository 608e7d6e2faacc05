import re
from collections import OrderedDict

import pytest

# key -> (ok, detail); keys like "4", "7a" or "6/20.0" group by their leading number
_VERDICTS = OrderedDict()


@pytest.fixture
def verdict():
    def record(criterion, ok, detail=""):
        _VERDICTS[str(criterion)] = (bool(ok), detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    grouped = OrderedDict()
    for key, (ok, detail) in _VERDICTS.items():
        number = int(re.match(r"\d+", key).group())
        grouped.setdefault(number, []).append((key, ok, detail))
    terminalreporter.section("acceptance criteria")
    for number in sorted(grouped):
        parts = grouped[number]
        ok = all(p[1] for p in parts)
        detail = "; ".join(f"{k}: {d}" if len(parts) > 1 else d for k, _, d in parts)
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
