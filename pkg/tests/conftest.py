import pytest

from sagegraph import from_edges

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, title = mark.args
    if rep.when == "call" or rep.failed:
        prev = _criteria.get(num, (title, True))[1]
        _criteria[num] = (title, prev and rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        title, ok = _criteria[num]
        terminalreporter.write_line(f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture
def g1():
    # 0->1, 0->2, 0->3, 1->0, 2->0, 3->4; v5 isolated
    return from_edges([0, 0, 0, 1, 2, 3], [1, 2, 3, 0, 0, 4], vertex_count=6)
