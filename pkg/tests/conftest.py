import pytest

from tlfrls.experiments import run_case1, run_case2


@pytest.fixture(scope="session")
def case1():
    return run_case1()


@pytest.fixture(scope="session")
def case2():
    return run_case2()


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for result in sorted(RESULTS, key=lambda r: r.id):
        terminalreporter.write_line(result.line())
    passed = sum(r.passed for r in RESULTS)
    terminalreporter.write_line(f"{passed}/{len(RESULTS)} criteria passed")
