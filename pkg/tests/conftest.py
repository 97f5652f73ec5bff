import pytest

_acceptance_key = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_acceptance_key] = []


@pytest.fixture
def record(request):
    """Log one acceptance line and fail the test if the criterion is not met."""
    lines = request.config.stash[_acceptance_key]

    def _record(number, title, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'}  criterion {number:>2}: {title} -- {detail}"
        lines.append(line)
        print(line)
        assert passed, line

    return _record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash[_acceptance_key]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
