import pytest

from zkfl.crypto import get_group


@pytest.fixture(scope="session")
def tg():
    return get_group("test")


@pytest.fixture(scope="session")
def pg():
    return get_group("prod")


@pytest.fixture(scope="session", params=["test", "prod"])
def group(request):
    return get_group(request.param)


_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def acceptance_record():
    """Record (criterion, passed, detail); one summary line per criterion is printed at the end."""

    def record(criterion: int, passed: bool, detail: str) -> bool:
        _ACCEPTANCE[criterion] = (bool(passed), detail)
        print(f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
