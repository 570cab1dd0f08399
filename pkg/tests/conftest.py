import pytest

_LINES = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_LINES] = {}


@pytest.fixture
def acceptance_line(request):
    """Record one summary line per acceptance item; printed at the end of the run."""
    lines = request.config.stash[_LINES]

    def record(key: str, title: str, ok: bool, detail: str = "") -> None:
        lines[key] = f"{'PASS' if ok else 'FAIL'}  {key}  {title}" + (f"  ({detail})" if detail else "")

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash[_LINES]
    if lines:
        terminalreporter.section("acceptance")
        for key in sorted(lines):
            terminalreporter.write_line(lines[key])
