import pytest

_ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(id): acceptance-criterion identifier for summary lines"
    )


@pytest.fixture
def acceptance_record():
    """Collect pass/fail lines for the acceptance summary."""

    def record(criterion: str, description: str, passed: bool = True):
        _ACCEPTANCE_RESULTS.append((criterion, passed, description))

    return record


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call" or call.excinfo is None:
        return
    _ACCEPTANCE_RESULTS.append((marker.args[0], False, "assertion failed"))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    combined: dict[str, tuple[bool, str]] = {}
    for crit, passed, desc in _ACCEPTANCE_RESULTS:
        if crit in combined:
            prev_passed, prev_desc = combined[crit]
            combined[crit] = (prev_passed and passed, prev_desc if prev_desc else desc)
        else:
            combined[crit] = (passed, desc)
    for crit in sorted(combined):
        passed, desc = combined[crit]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {crit}: {status} - {desc}")
