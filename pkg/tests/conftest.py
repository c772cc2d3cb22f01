import pytest

from shorthhg import RAAG, DefiningGraph
from shorthhg.extension import extension_ball, standard_vertex
from shorthhg.hierarchy import default_charts

from oracles import RewritingClosure


@pytest.fixture(scope="session")
def G():
    return RAAG(DefiningGraph.path("a", "b", "c"))


@pytest.fixture(scope="session")
def G4():
    return RAAG(DefiningGraph.path("a", "b", "c", "d"))


@pytest.fixture(scope="session")
def oracle():
    return RewritingClosure("abc", [("a", "b"), ("b", "c")])


@pytest.fixture(scope="session")
def oracle4():
    return RewritingClosure("abcd", [("a", "b"), ("b", "c"), ("c", "d")])


@pytest.fixture(scope="session")
def support1(G):
    return extension_ball(standard_vertex(G, "b"), 1)


@pytest.fixture(scope="session")
def exp_charts(G):
    return default_charts(G, "b", 0)


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line per criterion, then assert it."""

    def record(number, title, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}" + (f" ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
