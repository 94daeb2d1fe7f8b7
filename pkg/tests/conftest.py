import pytest

from gmqr import kernels

_ACCEPTANCE = []


@pytest.fixture(scope="session", autouse=True)
def _compile_kernels():
    kernels.warmup()


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(ok, detail)``; the test must still assert."""
    number = request.node.get_closest_marker("acceptance").args[0]
    title = request.node.get_closest_marker("acceptance").args[1]

    def record(ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} -- {detail}"
        _ACCEPTANCE.append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE, key=lambda t: t[0]):
        terminalreporter.write_line(line)
