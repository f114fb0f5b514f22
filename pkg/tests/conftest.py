import pytest

from nilorbit.group import symmetric_group
from nilorbit.verify import memo_catalog

# Filled by test_acceptance.py; printed at the end of the session.
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture(scope="session")
def catalog():
    """Degree -> list of catalog entries, built once per session."""
    return lambda n: memo_catalog(n)[0]


@pytest.fixture
def s4():
    return symmetric_group(4)


@pytest.fixture
def cache_dir(tmp_path, monkeypatch):
    d = tmp_path / "cache"
    monkeypatch.setenv("NILORBIT_CACHE", str(d))
    return d
