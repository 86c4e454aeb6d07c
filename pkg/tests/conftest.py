import pytest

from d2dtea.runner import GridCache, compute
from d2dtea.scenario import parse_scenario


@pytest.fixture(scope="session")
def presets():
    return {name: parse_scenario(name) for name in ("A", "B1000", "B2800")}


@pytest.fixture(scope="session")
def grid_cache():
    return GridCache()


@pytest.fixture(scope="session")
def result_a(presets, grid_cache):
    return compute(presets["A"], grid_cache)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
