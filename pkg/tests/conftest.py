import pytest


def pytest_configure(config):
    config.acceptance_results = []


@pytest.fixture
def acceptance_log(request):
    def record(criterion, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
        request.config.acceptance_results.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if config.acceptance_results:
        terminalreporter.section("acceptance criteria")
        for line in config.acceptance_results:
            terminalreporter.write_line(line)
