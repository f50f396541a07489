import io
import posixpath
import random
import warnings
import zipfile

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import patched_package, sheet_manifest
from sheetdiagram.errors import MalformedXmlError, MissingContentTypesError, NotAZipError
from sheetdiagram.forge import forge, forge_parts, zip_parts
from sheetdiagram.opc import (
    classify_part,
    normalize_part_path,
    open_package,
    read_relationships,
    rels_path_for,
    resolve_drawing_parts,
    resolve_target,
    resolve_theme_part,
    resolve_worksheets,
)

SEGMENTS = ["xl", "worksheets", "drawings", "..", ".", "a", "b", "sheet1.xml", "drawing1.xml"]


def oracle_resolve(source: str, target: str) -> str:
    # posixpath.normpath on an absolute path never climbs above "/"
    if target.startswith("/"):
        return posixpath.normpath(target).lstrip("/")
    return posixpath.normpath("/" + posixpath.dirname(source) + "/" + target).lstrip("/")


def test_resolve_target_matches_path_join_oracle():
    rng = random.Random(7)
    for _ in range(100):
        source = "/".join(rng.choice(SEGMENTS[:3] + ["a", "b"]) for _ in range(rng.randint(1, 3))) + "/part.xml"
        target = "/".join(rng.choice(SEGMENTS) for _ in range(rng.randint(1, 4)))
        if rng.random() < 0.2:
            target = "/" + target
        expected = oracle_resolve(source, target)
        assert resolve_target(source, target) == ("" if expected == "." else expected), (source, target)


def test_resolve_target_examples():
    assert resolve_target("xl/worksheets/sheet1.xml", "../drawings/drawing1.xml") == "xl/drawings/drawing1.xml"
    assert resolve_target("xl/workbook.xml", "/xl/theme/theme1.xml") == "xl/theme/theme1.xml"
    assert resolve_target("", "xl/workbook.xml") == "xl/workbook.xml"
    assert resolve_target("xl/workbook.xml", "worksheets/my%20sheet.xml") == "xl/worksheets/my sheet.xml"


@given(st.lists(st.sampled_from(SEGMENTS + ["", "x"]), max_size=8).map("/".join))
def test_normalize_is_idempotent(path):
    once = normalize_part_path(path)
    assert normalize_part_path(once) == once
    assert ".." not in once.split("/") and not once.startswith("/")


def test_rels_path_for():
    assert rels_path_for("xl/worksheets/sheet1.xml") == "xl/worksheets/_rels/sheet1.xml.rels"
    assert rels_path_for("/xl/workbook.xml") == "xl/_rels/workbook.xml.rels"


def test_open_from_bytes_and_path(tmp_path):
    data = forge(sheet_manifest([{"id": "r", "type": "rect", "frame": [0, 0, 10, 10]}]))
    path = tmp_path / "one.xlsx"
    path.write_bytes(data)
    a, b = open_package(data), open_package(path)
    assert a.part_names == b.part_names
    assert a.source == "<bytes>" and b.source == str(path)
    assert b.read("/xl/workbook.xml") == a.parts["xl/workbook.xml"]


def test_part_list_matches_forge():
    manifest = sheet_manifest([{"id": "r", "type": "rect", "frame": [0, 0, 10, 10]}])
    assert open_package(forge(manifest)).part_names == sorted(forge_parts(manifest))


def test_not_a_zip(tmp_path):
    with pytest.raises(NotAZipError):
        open_package(b"hello world")
    with pytest.raises(NotAZipError):
        open_package(b"PK\x03\x04truncated")


def test_missing_content_types():
    data = patched_package(sheet_manifest([]), **{"[Content_Types].xml": None})
    with pytest.raises(MissingContentTypesError):
        open_package(data)


def test_missing_file_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        open_package(tmp_path / "missing.xlsx")


def test_duplicate_entries_last_wins():
    parts = forge_parts(sheet_manifest([]))
    buf = io.BytesIO()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with zipfile.ZipFile(buf, "w") as zf:
            for name, data in parts.items():
                zf.writestr(name, data)
            zf.writestr("xl/extra.txt", b"first")
            zf.writestr("xl/extra.txt", b"second")
    diags = []
    pkg = open_package(buf.getvalue(), diags)
    assert pkg.read("xl/extra.txt") == b"second"
    assert [d.code for d in diags] == ["DuplicateZipEntry"]


def test_worksheets_follow_workbook_order():
    manifest = {"sheets": [{"name": n, "objects": []} for n in ("First", "Second", "Third")]}
    parts = forge_parts(manifest)
    # reverse the <sheet> elements; relationship ids stay attached
    wb = parts["xl/workbook.xml"].decode()
    head, rest = wb.split("<sheets>")
    body, tail = rest.split("</sheets>")
    items = ["<sheet" + s for s in body.split("<sheet") if s]
    parts["xl/workbook.xml"] = (head + "<sheets>" + "".join(reversed(items)) + "</sheets>" + tail).encode()
    sheets = resolve_worksheets(open_package(zip_parts(parts)))
    assert [s.sheet_name for s in sheets] == ["Third", "Second", "First"]
    assert [s.path for s in sheets] == ["xl/worksheets/sheet3.xml", "xl/worksheets/sheet2.xml", "xl/worksheets/sheet1.xml"]


def test_dangling_drawing_relationship_is_reported():
    manifest = sheet_manifest([{"id": "r", "type": "rect", "frame": [0, 0, 10, 10]}])
    data = patched_package(manifest, **{"xl__drawings__drawing1.xml": None})
    diags = []
    assert resolve_drawing_parts(open_package(data), diags) == []
    assert [d.code for d in diags] == ["DanglingRelationship"]


def test_drawing_parts_carry_owner_and_sheet():
    manifest = {"sheets": [
        {"name": "Empty", "objects": []},
        {"name": "Pic", "objects": [{"id": "r", "type": "rect", "frame": [0, 0, 10, 10]}]},
    ]}
    drawings = resolve_drawing_parts(open_package(forge(manifest)))
    assert [(d.path, d.owner, d.sheet_name) for d in drawings] == [
        ("xl/drawings/drawing1.xml", "xl/worksheets/sheet2.xml", "Pic")
    ]


def test_first_theme_wins():
    manifest = sheet_manifest([])
    parts = forge_parts(manifest)
    rels = parts["xl/_rels/workbook.xml.rels"].decode()
    extra = ('<Relationship Id="rId99" Type="http://schemas.openxmlformats.org/officeDocument/2006/'
             'relationships/theme" Target="theme/theme2.xml"/>')
    parts["xl/_rels/workbook.xml.rels"] = rels.replace("</Relationships>", extra + "</Relationships>").encode()
    parts["xl/theme/theme2.xml"] = parts["xl/theme/theme1.xml"]
    pkg = open_package(zip_parts(parts))
    assert resolve_theme_part(pkg).path == "xl/theme/theme1.xml"
    assert [r.rel_id for r in read_relationships(pkg, "xl/workbook.xml")][-1] == "rId99"


def test_no_theme():
    pkg = open_package(forge(sheet_manifest([], theme=None)))
    assert resolve_theme_part(pkg) is None


def test_malformed_rels_is_fatal():
    data = patched_package(sheet_manifest([]), **{"xl__workbook.xml": b"<workbook"})
    with pytest.raises(MalformedXmlError):
        resolve_worksheets(open_package(data))


@pytest.mark.parametrize("path,kind", [
    ("xl/workbook.xml", "workbook"),
    ("xl/worksheets/sheet1.xml", "worksheet"),
    ("xl/drawings/drawing3.xml", "drawing"),
    ("xl/theme/theme1.xml", "theme"),
    ("xl/_rels/workbook.xml.rels", "rels"),
    ("docProps/app.xml", "other"),
])
def test_classify_part(path, kind):
    assert classify_part(path) == kind
