import io
import zipfile

import pytest

from conftest import expected_edges, named_edges, sheet_manifest
from sheetdiagram.errors import InvalidManifestError
from sheetdiagram.forge import (
    builtin_manifest,
    connector_placement,
    declared_index,
    forge,
    forge_parts,
    lint_manifest,
)
from sheetdiagram.geometry import connector_path
from sheetdiagram.graph import build_graph
from sheetdiagram.model import extract_diagram


def test_builtin_manifests_lint_clean():
    for name in ("fig2", "minimal"):
        assert lint_manifest(builtin_manifest(name)) == []


def test_forge_is_byte_deterministic(fig2_manifest):
    assert forge(fig2_manifest) == forge(fig2_manifest)


def test_package_layout():
    names = zipfile.ZipFile(io.BytesIO(forge(builtin_manifest("minimal")))).namelist()
    assert names[0] == "[Content_Types].xml"
    assert set(names) == {
        "[Content_Types].xml", "_rels/.rels", "xl/workbook.xml", "xl/_rels/workbook.xml.rels",
        "xl/worksheets/sheet1.xml", "xl/worksheets/_rels/sheet1.xml.rels",
        "xl/drawings/drawing1.xml", "xl/theme/theme1.xml",
    }


def test_no_theme_and_no_drawing_parts():
    parts = forge_parts(sheet_manifest([], theme=None))
    assert not any(n.startswith(("xl/theme", "xl/drawings")) for n in parts)


def test_minimal_fixture_is_one_red_rectangle():
    d = extract_diagram(forge(builtin_manifest("minimal")))
    assert [(s.kind, s.fill_color, s.border_color) for s in d.shapes] == [("rectangle", "#FF0000", "#000000")]
    assert d.connectors == ()


def test_fig2_counts_and_edges(fig2_manifest, fig2_diagram):
    expected = fig2_manifest["expected"]
    assert len(fig2_diagram.shapes) == expected["shapes"]
    assert len(fig2_diagram.connectors) == expected["connectors"]
    index = declared_index(fig2_manifest)
    assert named_edges(build_graph(fig2_diagram), index) == expected_edges(fig2_manifest)


@pytest.mark.parametrize("preset", ["bentConnector2", "bentConnector3"])
@pytest.mark.parametrize("start,end", [((0, 0), (100, 60)), ((100, 60), (0, 0)), ((0, 60), (100, 0)), ((100, 0), (0, 60))])
def test_vertical_first_routes_start_vertically(preset, start, end):
    obj = {"id": "c", "type": "connector", "preset": preset, "start": list(start), "end": list(end), "route": "vh"}
    p = connector_placement(obj)
    path = connector_path(p.frame, preset, rot=p.rot, flip_h=p.flip_h, flip_v=p.flip_v)
    assert path.start == pytest.approx(start, abs=0.01) and path.end == pytest.approx(end, abs=0.01)
    assert path.points[0][0] == pytest.approx(path.points[1][0], abs=0.01)


@pytest.mark.parametrize("start,end", [((0, 0), (100, 60)), ((100, 60), (0, 0)), ((0, 60), (100, 0))])
def test_horizontal_first_routes(start, end):
    obj = {"id": "c", "type": "connector", "preset": "bentConnector3", "start": list(start), "end": list(end)}
    p = connector_placement(obj)
    path = connector_path(p.frame, "bentConnector3", rot=p.rot, flip_h=p.flip_h, flip_v=p.flip_v)
    assert path.start == pytest.approx(start) and path.end == pytest.approx(end)
    assert path.points[0][1] == pytest.approx(path.points[1][1])


@pytest.mark.parametrize("objects,expected,needle", [
    ([{"id": "a", "type": "rect", "frame": [0, 0, 1, 1]}, {"id": "a", "type": "rect", "frame": [0, 0, 1, 1]}],
     None, "duplicate"),
    ([{"id": "a", "type": "hexagon", "frame": [0, 0, 1, 1]}], None, "unknown type"),
    ([{"id": "a", "type": "rect"}], None, "missing frame"),
    ([{"id": "c", "type": "connector"}], None, "start/end"),
    ([{"id": "a", "type": "rect", "frame": [0, 0, 1, 1]}], {"shapes": 2}, "expected 2 shapes"),
    ([{"id": "a", "type": "rect", "frame": [0, 0, 1, 1]}],
     {"components": [{"name": "A", "rect": "a", "label": "missing"}]}, "not a declared text box"),
    ([{"id": "a", "type": "rect", "frame": [0, 0, 1, 1]}],
     {"edges": [{"connector": "nope", "from": "a", "to": "a"}]}, "not a declared connector"),
    ([{"id": "a", "type": "rect", "frame": [0, 0, 1, 1]}],
     {"components": [{"name": "", "rect": "a", "label": None}],
      "edges": [{"connector": "nope", "from": "a", "to": "a"}], "connector_free": ["a"]}, "connector-free"),
])
def test_lint_catches_inconsistencies(objects, expected, needle):
    manifest = sheet_manifest(objects, expected=expected)
    assert any(needle in p for p in lint_manifest(manifest))
    with pytest.raises(InvalidManifestError, match=needle):
        forge(manifest)


def test_lint_rejects_empty_manifest():
    assert lint_manifest({}) == ["manifest needs a non-empty 'sheets' list"]


def test_group_children_are_indexed_in_order():
    group = {"id": "g", "type": "group", "frame": [0, 0, 10, 10],
             "children": [{"id": "x", "type": "rect", "frame": [0, 0, 1, 1]},
                          {"id": "y", "type": "connector", "start": [0, 0], "end": [1, 1]}]}
    index = declared_index(sheet_manifest([{"id": "a", "type": "textBox", "frame": [0, 0, 1, 1]}, group]))
    assert index == {"shapes": {"a": 0, "x": 1}, "connectors": {"y": 0}}


def test_pictures_are_not_indexed(fig2_manifest):
    assert "icon" not in declared_index(fig2_manifest)["shapes"]
