from __future__ import annotations

import sys

import pytest

from hkchar2 import colength as col


@pytest.fixture(scope="session")
def cache(tmp_path_factory) -> col.ColengthCache:
    return col.ColengthCache(tmp_path_factory.mktemp("colengths"))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
