from __future__ import annotations

import pytest

from craql import Environment, Evaluator, OutputSink, load_project, parse_query_document, source_text
from craql.fixtures import fixture_text


def load_fixture_project(name: str, *files: str):
    project, diagnostics = load_project(name, [(f, fixture_text(f)) for f in files])
    assert not diagnostics, diagnostics
    return project


def node_text(project, node_id: int) -> str:
    return source_text(project, node_id)


def find_node(project, type_name: str, contains: str | None = None):
    """First node of the given concrete type whose source contains `contains`."""
    for node in project.nodes:
        if node.type != type_name:
            continue
        if contains is None or contains in source_text(project, node.id):
            return node
    raise AssertionError(f"no {type_name} node containing {contains!r}")


def run_document(project, text: str, seed: dict | None = None, source: str = "<test>"):
    doc = parse_query_document(text, source)
    env = Environment(seed or {})
    sink = OutputSink()
    evaluator = Evaluator(project, env, sink, source=source)
    evaluator.execute_document(doc)
    return env, sink, evaluator


@pytest.fixture(scope="session")
def sample_project():
    return load_fixture_project("sample", "Sample.mj")


@pytest.fixture(scope="session")
def fact_project():
    return load_fixture_project("fact", "Fact.mj")


@pytest.fixture(scope="session")
def ab_project():
    return load_fixture_project("ab", "AB.mj")
