from pathlib import Path

import pytest

from robobdd import codegen, fixture_path
from robobdd import vocab as V
from robobdd.dsl import load_project

GOLDEN = Path(__file__).parent / "golden"
LAB = "https://my.url/models/lab/"

# criterion id ("1", "3a", ...) -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def ctx():
    return V.default_context()


@pytest.fixture(scope="session")
def source_map():
    return {}


@pytest.fixture(scope="session")
def fixture_graph(source_map):
    return load_project(fixture_path(), source_map=source_map)


@pytest.fixture
def graph(fixture_graph):
    """A private copy that tests may mutate."""
    return fixture_graph.copy()


@pytest.fixture(scope="session")
def story(fixture_graph):
    (s,) = codegen.stories(fixture_graph)
    return s


@pytest.fixture(scope="session")
def manifest(fixture_graph, story):
    return codegen.emit_manifest(fixture_graph, story)


def lab(path: str) -> str:
    return LAB + path


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
