from pathlib import Path

import pytest

from modlog.kgraph import load_ntriples

DATA = Path(__file__).parent / "data"
DBR = "http://dbpedia.org/resource/"


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def tennis_graph():
    return load_ntriples([DATA / "tennis.nt"])


@pytest.fixture(scope="session")
def golden_graph():
    return load_ntriples([DATA / "golden_kb.nt"])


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
        terminalreporter.write_line(line)
