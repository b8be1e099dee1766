import pytest

_CRITERIA = []


class CriterionLog:
    """Collects one line per acceptance criterion for the terminal summary."""

    def __init__(self, number, title):
        self.number, self.title, self.details = number, title, []

    def note(self, text):
        self.details.append(text)

    def check(self, ok, text):
        self.note(text)
        assert ok, f"criterion {self.number}: {text}"


@pytest.fixture
def criterion(request):
    logs = []

    def make(number, title):
        log = CriterionLog(number, title)
        logs.append(log)
        return log

    yield make
    failed = getattr(request.node, "rep_call", None)
    ok = failed is not None and failed.passed
    for log in logs:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {log.number:>2}: {log.title}"
        if log.details:
            line += " | " + "; ".join(log.details)
        print(line)
        _CRITERIA.append((log.number, line))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_CRITERIA):
        terminalreporter.write_line(line)
