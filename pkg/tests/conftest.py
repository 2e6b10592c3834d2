from importlib import resources

import pytest

from netecc.code import construct_deterministic, load_code
from netecc.field import FieldSpec
from netecc.graph import load_network, parse_network


def data_path(name: str) -> str:
    return str(resources.files("netecc") / "data" / name)


def fixture_network(name: str):
    return load_network(data_path(name))


@pytest.fixture(scope="session")
def fig1():
    return fixture_network("fig1.net")


@pytest.fixture(scope="session")
def diamond():
    return fixture_network("diamond.net")


@pytest.fixture(scope="session")
def threenode():
    return fixture_network("threenode.net")


@pytest.fixture(scope="session")
def p2p4():
    return fixture_network("p2p4.net")


@pytest.fixture(scope="session")
def sum_code(threenode):
    return load_code(data_path("threenode_sum.code"), threenode)


@pytest.fixture(scope="session")
def diamond_built(diamond):
    return construct_deterministic(diamond, 1, 1, FieldSpec(17))


@pytest.fixture(scope="session")
def fig1_built(fig1):
    return construct_deterministic(fig1, 2, 1, FieldSpec(421))


@pytest.fixture(scope="session")
def two_sink():
    """Sink t1 has min-cut 4, sink t2 has min-cut 2."""
    lines = ["node s", "node t1", "node t2", "source s", "sink t1", "sink t2"]
    lines += [f"edge {i} s t1" for i in range(4)]
    lines += ["edge 4 s t2", "edge 5 s t2"]
    return parse_network("\n".join(lines))


# --- acceptance summary ---------------------------------------------------------

_CRITERIA: dict[int, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _CRITERIA[number] = (title, "PASS" if rep.passed else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, verdict = _CRITERIA[number]
        terminalreporter.write_line(f"{verdict} criterion {number}: {title}")
