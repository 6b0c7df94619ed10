import pytest

_RESULTS: list[tuple[str, bool, str]] = []


class _Criterion:
    detail = ""


@pytest.fixture
def criterion():
    """Tests that take this fixture get a PASS/FAIL line in the summary."""
    return _Criterion()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and "criterion" in getattr(item, "funcargs", {}):
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        _RESULTS.append((doc, report.passed, item.funcargs["criterion"].detail))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance")
    for label, ok, detail in _RESULTS:
        line = f"{'PASS' if ok else 'FAIL'} {label}"
        terminalreporter.write_line(f"{line} ({detail})" if detail else line)
