from __future__ import annotations

import copy

import pytest

from sheetdiagram.forge import builtin_manifest, forge, forge_parts, zip_parts

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def sheet_manifest(objects, expected=None, theme=..., **sheet) -> dict:
    """One-sheet manifest around ``objects``."""
    manifest = {"name": "adhoc", "sheets": [{"name": "Sheet1", "objects": objects, **sheet}]}
    if expected is not None:
        manifest["expected"] = expected
    if theme is not ...:
        manifest["theme"] = theme
    return manifest


def forge_objects(objects, **kwargs) -> bytes:
    return forge(sheet_manifest(objects, **kwargs))


def patched_package(manifest: dict, **changes) -> bytes:
    """Forge ``manifest`` and then replace (bytes) or drop (None) individual parts."""
    parts = forge_parts(manifest)
    for name, data in changes.items():
        name = name.replace("__", "/")
        if data is None:
            parts.pop(name, None)
        else:
            parts[name] = data
    return zip_parts(parts)


@pytest.fixture(scope="session")
def fig2_manifest() -> dict:
    return builtin_manifest("fig2")


@pytest.fixture
def fig2_copy(fig2_manifest) -> dict:
    return copy.deepcopy(fig2_manifest)


@pytest.fixture(scope="session")
def fig2_path(tmp_path_factory, fig2_manifest):
    path = tmp_path_factory.mktemp("fixtures") / "fig2.xlsx"
    path.write_bytes(forge(fig2_manifest))
    return path


@pytest.fixture(scope="session")
def fig2_diagram(fig2_path):
    from sheetdiagram.model import extract_diagram

    return extract_diagram(fig2_path)


def named_edges(graph, index) -> set[tuple[str, str, str]]:
    """Edges as (connector, from, to) manifest ids; unbound ends become None."""
    shape_ids = {v: k for k, v in index["shapes"].items()}
    conn_ids = {v: k for k, v in index["connectors"].items()}

    def node(ref):
        if ref.kind == "component":
            return shape_ids[graph.components[ref.id].rect_shape_id]
        if ref.kind == "shape":
            return shape_ids[ref.id]
        return None

    return {(conn_ids[e.connector_id], node(e.from_ref), node(e.to_ref)) for e in graph.edges}


def expected_edges(manifest) -> set[tuple[str, str, str]]:
    return {(e["connector"], e["from"], e["to"]) for e in manifest["expected"].get("edges", [])}
