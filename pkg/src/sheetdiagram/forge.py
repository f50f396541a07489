"""Generate small, valid ``.xlsx`` packages from a declarative JSON manifest.

Every byte is written here from plain strings, so fixtures need no Office
installation and can be audited. A manifest declares sheets (column widths, row
heights) and drawing objects in points; the forge computes cell anchors, frames,
flips and rotations. The ``expected`` block records what extraction and graph
inference must recover.

Manifest objects (all coordinates in points)::

    {"id": "app", "type": "roundRect", "frame": [x, y, w, h],
     "fill": "#DDEBF7", "line": {"scheme": "accent1"}, "text": "Azure App Service"}
    {"id": "c0", "type": "connector", "preset": "bentConnector3",
     "start": [x, y], "end": [x, y], "route": "vh", "arrow": "end"}
    {"id": "g", "type": "group", "frame": [...], "child_frame": [...], "children": [...]}

``type`` is one of ``rect``, ``roundRect``, ``textBox``, ``shape`` (with an
arbitrary ``preset``), ``connector``, ``group`` or ``picture``. Colors are
``"#RRGGBB"``, ``"none"``, ``{"scheme": name, "transforms": [[op, val], ...]}``
or ``{"system": name, "last": "RRGGBB"}``.
"""

from __future__ import annotations

import io
import json
import zipfile
from dataclasses import dataclass
from importlib import resources
from typing import Any, Iterator
from xml.sax.saxutils import escape, quoteattr

from .colors import OFFICE_PALETTE, SCHEME_SLOTS
from .drawingml import BENT_PRESETS, STRAIGHT_PRESETS, XfrmSpec
from .errors import InvalidManifestError
from .geometry import local_connector_points, render_local
from .metrics import DEFAULT_COL_WIDTH_CHARS, DEFAULT_ROW_HEIGHT_PT, FrameEmu, SheetMetrics
from .units import ANGLE_UNITS_PER_DEGREE, EMU_PER_PT, FULL_TURN

NS_MAIN = "http://schemas.openxmlformats.org/spreadsheetml/2006/main"
NS_R = "http://schemas.openxmlformats.org/officeDocument/2006/relationships"
NS_PKG_RELS = "http://schemas.openxmlformats.org/package/2006/relationships"
NS_XDR = "http://schemas.openxmlformats.org/drawingml/2006/spreadsheetDrawing"
NS_A = "http://schemas.openxmlformats.org/drawingml/2006/main"
REL = "http://schemas.openxmlformats.org/officeDocument/2006/relationships/"
CT = "application/vnd.openxmlformats-officedocument."

XML_DECL = '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n'
ZIP_DATE = (1980, 1, 1, 0, 0, 0)

SHAPE_TYPES = {"rect": "rect", "roundRect": "roundRect", "textBox": "rect"}
OBJECT_TYPES = set(SHAPE_TYPES) | {"shape", "connector", "group", "picture"}
CONNECTOR_PRESETS = STRAIGHT_PRESETS | BENT_PRESETS


def emu(pt: float) -> int:
    return int(round(pt * EMU_PER_PT))


# --- manifest access ------------------------------------------------------


def builtin_manifest(name: str) -> dict:
    """Load one of the manifests shipped with the package (``fig2``, ``minimal``, ...)."""
    text = resources.files("sheetdiagram").joinpath(f"manifests/{name}.json").read_text("utf-8")
    return json.loads(text)


def iter_objects(objects: list[dict], depth: int = 0) -> Iterator[tuple[dict, int]]:
    """Depth-first walk in document order, yielding ``(object, nesting depth)``."""
    for obj in objects:
        yield obj, depth
        if obj.get("type") == "group":
            yield from iter_objects(obj.get("children", []), depth + 1)


def _is_shape(obj: dict) -> bool:
    return obj.get("type") in SHAPE_TYPES


def _is_connector(obj: dict) -> bool:
    return obj.get("type") == "connector" and obj.get("preset", "straightConnector1") in CONNECTOR_PRESETS


def declared_index(manifest: dict) -> dict[str, dict[str, int]]:
    """Canonical ids implied by declaration order: ``{"shapes": {oid: id}, "connectors": {...}}``."""
    shapes: dict[str, int] = {}
    connectors: dict[str, int] = {}
    for sheet in manifest.get("sheets", []):
        for obj, _ in iter_objects(sheet.get("objects", [])):
            if _is_shape(obj):
                shapes[obj["id"]] = len(shapes)
            elif _is_connector(obj):
                connectors[obj["id"]] = len(connectors)
    return {"shapes": shapes, "connectors": connectors}


def lint_manifest(manifest: dict) -> list[str]:
    """Consistency problems between declared objects and expected outcomes."""
    problems: list[str] = []
    by_id: dict[str, dict] = {}
    sheets = manifest.get("sheets")
    if not isinstance(sheets, list) or not sheets:
        return ["manifest needs a non-empty 'sheets' list"]
    for sheet in sheets:
        for obj, _ in iter_objects(sheet.get("objects", [])):
            oid = obj.get("id")
            if not oid:
                problems.append(f"object without id: {obj}")
                continue
            if oid in by_id:
                problems.append(f"duplicate object id {oid!r}")
            by_id[oid] = obj
            kind = obj.get("type")
            if kind not in OBJECT_TYPES:
                problems.append(f"{oid}: unknown type {kind!r}")
            elif kind == "connector":
                if not ("start" in obj and "end" in obj) and "frame" not in obj:
                    problems.append(f"{oid}: connector needs start/end or frame")
            elif kind != "group" and "frame" not in obj:
                problems.append(f"{oid}: missing frame")

    expected = manifest.get("expected")
    if not expected:
        return problems
    index = declared_index(manifest)

    def is_type(oid: str, *types: str) -> bool:
        return oid in by_id and by_id[oid].get("type") in types

    if "shapes" in expected and expected["shapes"] != len(index["shapes"]):
        problems.append(f"expected {expected['shapes']} shapes but {len(index['shapes'])} are declared")
    if "connectors" in expected and expected["connectors"] != len(index["connectors"]):
        problems.append(f"expected {expected['connectors']} connectors but {len(index['connectors'])} are declared")
    for comp in expected.get("components", []):
        if not is_type(comp.get("rect", ""), "rect", "roundRect"):
            problems.append(f"component {comp.get('name')!r}: rect {comp.get('rect')!r} is not a declared rectangle")
        label = comp.get("label")
        if label is not None and not is_type(label, "textBox"):
            problems.append(f"component {comp.get('name')!r}: label {label!r} is not a declared text box")
        elif label is not None and by_id[label].get("text") != comp.get("name"):
            problems.append(f"component {comp.get('name')!r}: label text differs")
    node_ids = {c.get("rect") for c in expected.get("components", [])} | set(expected.get("free_text", []))
    for edge in expected.get("edges", []):
        if edge.get("connector") not in index["connectors"]:
            problems.append(f"edge connector {edge.get('connector')!r} is not a declared connector")
        for end in ("from", "to"):
            if edge.get(end) not in node_ids:
                problems.append(f"edge {edge.get('connector')!r}: {end} {edge.get(end)!r} is not a component or free text")
    for ann in expected.get("annotations", []):
        if not is_type(ann.get("shape", ""), "textBox"):
            problems.append(f"annotation {ann.get('shape')!r} is not a declared text box")
        if ann.get("connector") not in index["connectors"]:
            problems.append(f"annotation {ann.get('shape')!r}: unknown connector {ann.get('connector')!r}")
    connected = {e.get(k) for e in expected.get("edges", []) for k in ("from", "to")}
    for rid in expected.get("connector_free", []):
        if rid in connected:
            problems.append(f"{rid!r} is declared connector-free but appears in an edge")
    return problems


# --- geometry helpers -----------------------------------------------------


@dataclass(frozen=True)
class Placement:
    frame: FrameEmu
    rot: int = 0
    flip_h: bool = False
    flip_v: bool = False


def _frame(values: list[float]) -> FrameEmu:
    x, y, w, h = values
    return FrameEmu(emu(x), emu(y), emu(w), emu(h))


def _rot(obj: dict) -> int:
    return int(round(obj.get("rot", 0) * ANGLE_UNITS_PER_DEGREE)) % FULL_TURN


def _adjustments(obj: dict) -> list[tuple[str, int]]:
    return sorted((k, int(v)) for k, v in obj.get("adj", {}).items())


def connector_placement(obj: dict) -> Placement:
    """Frame, rotation and flips that make a connector run from ``start`` to ``end``."""
    if "frame" in obj:
        return Placement(_frame(obj["frame"]), _rot(obj), obj.get("flip_h", False), obj.get("flip_v", False))
    (sx, sy), (ex, ey) = obj["start"], obj["end"]
    S, E = (emu(sx), emu(sy)), (emu(ex), emu(ey))
    preset = obj.get("preset", "straightConnector1")
    route = obj.get("route", "hv")
    dx, dy = abs(E[0] - S[0]), abs(E[1] - S[1])
    x0, y0 = min(S[0], E[0]), min(S[1], E[1])
    if route == "hv" or preset in STRAIGHT_PRESETS:
        return Placement(FrameEmu(x0, y0, dx, dy), 0, E[0] < S[0], E[1] < S[1])

    # vertical-first elbows are stored turned by a quarter: search the four flip states
    cxm, cym = x0 + dx / 2, y0 + dy / 2
    frame = FrameEmu(cxm - dy / 2, cym - dx / 2, dy, dx)
    local = local_connector_points(preset, frame.cx, frame.cy, _adjustments(obj))
    for rot in (90, 270):
        for fh in (False, True):
            for fv in (False, True):
                pts = render_local(local, frame, rot * ANGLE_UNITS_PER_DEGREE, fh, fv)
                if (
                    abs(pts[0].x - S[0]) < 1 and abs(pts[0].y - S[1]) < 1
                    and abs(pts[-1].x - E[0]) < 1 and abs(pts[-1].y - E[1]) < 1
                ):
                    return Placement(frame, rot * ANGLE_UNITS_PER_DEGREE, fh, fv)
    raise InvalidManifestError(f"{obj.get('id')}: no placement realizes route {route!r}")


def _find_cell(origin, pos: int) -> tuple[int, int]:
    # largest index whose origin is <= pos
    lo, hi = 0, 1
    while origin(hi) <= pos:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if origin(mid) <= pos:
            lo = mid
        else:
            hi = mid
    return lo, pos - origin(lo)


def sheet_metrics(sheet: dict) -> SheetMetrics:
    cols: dict[int, float] = {}
    for col in sheet.get("cols", []):
        width = 0.0 if col.get("hidden") else float(col["width"])
        for c in range(col["min"] - 1, col.get("max", col["min"])):
            cols[c] = width
    rows = {r["r"] - 1: (0.0 if r.get("hidden") else float(r["ht"])) for r in sheet.get("rows", [])}
    return SheetMetrics(
        default_col_width_chars=sheet.get("default_col_width", DEFAULT_COL_WIDTH_CHARS),
        default_row_height_pt=sheet.get("default_row_height", DEFAULT_ROW_HEIGHT_PT),
        col_width_overrides=cols,
        row_height_overrides=rows,
    )


# --- XML writers ----------------------------------------------------------


def _color_xml(color: Any) -> str:
    if isinstance(color, str):
        return f'<a:srgbClr val="{color.lstrip("#").upper()}"/>'
    transforms = "".join(f'<a:{op} val="{int(val)}"/>' for op, val in color.get("transforms", []))
    if "scheme" in color:
        return f'<a:schemeClr val="{color["scheme"]}">{transforms}</a:schemeClr>'
    if "system" in color:
        last = f' lastClr="{color["last"]}"' if "last" in color else ""
        return f'<a:sysClr val="{color["system"]}"{last}>{transforms}</a:sysClr>'
    raise InvalidManifestError(f"bad color {color!r}")


def _fill_xml(color: Any) -> str:
    if color is None:
        return ""
    if color == "none":
        return "<a:noFill/>"
    if color == "gradient":
        return '<a:gradFill><a:gsLst><a:gs pos="0"><a:srgbClr val="FFFFFF"/></a:gs></a:gsLst></a:gradFill>'
    return f"<a:solidFill>{_color_xml(color)}</a:solidFill>"


def _line_xml(obj: dict, connector: bool = False) -> str:
    color = obj.get("line")
    arrow = obj.get("arrow", "end") if connector else "none"
    if color is None and arrow == "none" and "line_width" not in obj:
        return ""
    width = obj.get("line_width", 1.0 if connector else 0.75)
    inner = _fill_xml(color)
    if arrow in ("start", "both"):
        inner += '<a:headEnd type="triangle"/>'
    if arrow in ("end", "both"):
        inner += '<a:tailEnd type="triangle"/>'
    return f'<a:ln w="{emu(width)}">{inner}</a:ln>'


def _xfrm_xml(p: Placement, group: tuple[FrameEmu, FrameEmu] | None = None) -> str:
    attrs = ""
    if p.rot:
        attrs += f' rot="{p.rot}"'
    if p.flip_h:
        attrs += ' flipH="1"'
    if p.flip_v:
        attrs += ' flipV="1"'
    f = p.frame
    body = f'<a:off x="{round(f.x)}" y="{round(f.y)}"/><a:ext cx="{round(f.cx)}" cy="{round(f.cy)}"/>'
    if group is not None:
        ch = group[1]
        body += f'<a:chOff x="{round(ch.x)}" y="{round(ch.y)}"/><a:chExt cx="{round(ch.cx)}" cy="{round(ch.cy)}"/>'
    return f"<a:xfrm{attrs}>{body}</a:xfrm>"


def _style_xml(style: dict | None) -> str:
    if not style:
        return ""
    ln = style.get("line")
    fill = style.get("fill")
    ln_xml = f'<a:lnRef idx="2">{_color_xml(ln)}</a:lnRef>' if ln else '<a:lnRef idx="0"><a:scrgbClr r="0" g="0" b="0"/></a:lnRef>'
    fill_xml = f'<a:fillRef idx="1">{_color_xml(fill)}</a:fillRef>' if fill else '<a:fillRef idx="0"><a:scrgbClr r="0" g="0" b="0"/></a:fillRef>'
    return (
        f"<xdr:style>{ln_xml}{fill_xml}"
        '<a:effectRef idx="0"><a:scrgbClr r="0" g="0" b="0"/></a:effectRef>'
        '<a:fontRef idx="minor"><a:schemeClr val="tx1"/></a:fontRef></xdr:style>'
    )


def _text_xml(text: Any) -> str:
    if text is None:
        return ""
    paragraphs = text if isinstance(text, list) else str(text).split("\n")
    ps = []
    for para in paragraphs:
        runs = para if isinstance(para, list) else [para]
        ps.append("<a:p>" + "".join(f'<a:r><a:rPr lang="en-US" sz="1100"/><a:t>{escape(r)}</a:t></a:r>' for r in runs if r != "") + "</a:p>")
    return '<xdr:txBody><a:bodyPr vertOverflow="clip" rtlCol="0" anchor="ctr"/><a:lstStyle/>' + "".join(ps) + "</xdr:txBody>"


class _Writer:
    def __init__(self):
        self.next_id = 2

    def nv(self, obj: dict, default: str) -> str:
        cid = self.next_id
        self.next_id += 1
        return f'<xdr:cNvPr id="{cid}" name={quoteattr(obj.get("name", f"{default} {cid - 1}"))}/>'

    def body(self, obj: dict, placement: Placement | None = None) -> str:
        kind = obj["type"]
        if kind == "group":
            return self.group(obj)
        if kind == "connector":
            return self.connector(obj)
        if kind == "picture":
            p = placement or Placement(_frame(obj["frame"]))
            return (
                f'<xdr:pic><xdr:nvPicPr>{self.nv(obj, "Picture")}<xdr:cNvPicPr/></xdr:nvPicPr>'
                '<xdr:blipFill><a:stretch><a:fillRect/></a:stretch></xdr:blipFill>'
                f'<xdr:spPr>{_xfrm_xml(p)}<a:prstGeom prst="rect"><a:avLst/></a:prstGeom></xdr:spPr></xdr:pic>'
            )
        p = placement or Placement(_frame(obj["frame"]), _rot(obj), obj.get("flip_h", False), obj.get("flip_v", False))
        preset = obj.get("preset", SHAPE_TYPES.get(kind, "rect"))
        tx = ' txBox="1"' if kind == "textBox" else ""
        text = obj.get("text")
        if kind == "textBox" and text is None:
            text = ""
        xfrm = "" if obj.get("omit_xfrm") else _xfrm_xml(p)
        default_name = "TextBox" if kind == "textBox" else "Shape"
        return (
            f'<xdr:sp macro="" textlink=""><xdr:nvSpPr>{self.nv(obj, default_name)}<xdr:cNvSpPr{tx}/></xdr:nvSpPr>'
            f'<xdr:spPr>{xfrm}<a:prstGeom prst="{preset}"><a:avLst/></a:prstGeom>'
            f"{_fill_xml(obj.get('fill'))}{_line_xml(obj)}</xdr:spPr>"
            f"{_style_xml(obj.get('style'))}{_text_xml(text)}</xdr:sp>"
        )

    def connector(self, obj: dict) -> str:
        p = connector_placement(obj)
        preset = obj.get("preset", "straightConnector1")
        gds = "".join(f'<a:gd name="{k}" fmla="val {v}"/>' for k, v in _adjustments(obj))
        return (
            f'<xdr:cxnSp macro=""><xdr:nvCxnSpPr>{self.nv(obj, "Connector")}<xdr:cNvCxnSpPr/></xdr:nvCxnSpPr>'
            f'<xdr:spPr>{_xfrm_xml(p)}<a:prstGeom prst="{preset}"><a:avLst>{gds}</a:avLst></a:prstGeom>'
            f"{_line_xml(obj, connector=True)}</xdr:spPr>{_style_xml(obj.get('style'))}</xdr:cxnSp>"
        )

    def group(self, obj: dict) -> str:
        frame = _frame(obj["frame"])
        child = _frame(obj.get("child_frame", obj["frame"]))
        p = Placement(frame, _rot(obj), obj.get("flip_h", False), obj.get("flip_v", False))
        children = "".join(self.body(c) for c in obj.get("children", []))
        return (
            f'<xdr:grpSp><xdr:nvGrpSpPr>{self.nv(obj, "Group")}<xdr:cNvGrpSpPr/></xdr:nvGrpSpPr>'
            f"<xdr:grpSpPr>{_xfrm_xml(p, (frame, child))}</xdr:grpSpPr>{children}</xdr:grpSp>"
        )


def _marker(tag: str, metrics: SheetMetrics, x: int, y: int) -> str:
    col, col_off = _find_cell(metrics.col_origin, x)
    row, row_off = _find_cell(metrics.row_origin, y)
    return (
        f"<xdr:{tag}><xdr:col>{col}</xdr:col><xdr:colOff>{col_off}</xdr:colOff>"
        f"<xdr:row>{row}</xdr:row><xdr:rowOff>{row_off}</xdr:rowOff></xdr:{tag}>"
    )


def _anchor_frame(obj: dict) -> FrameEmu:
    if obj["type"] == "connector":
        return connector_placement(obj).frame
    return _frame(obj["frame"])


def drawing_xml(sheet: dict) -> str:
    metrics = sheet_metrics(sheet)
    writer = _Writer()
    anchors = []
    for obj in sheet.get("objects", []):
        f = _anchor_frame(obj)
        x, y, cx, cy = (int(round(v)) for v in (f.x, f.y, f.cx, f.cy))
        body = writer.body(obj)
        kind = obj.get("anchor", "twoCell")
        if kind == "twoCell":
            anchors.append(
                '<xdr:twoCellAnchor editAs="oneCell">'
                f"{_marker('from', metrics, x, y)}{_marker('to', metrics, x + cx, y + cy)}"
                f"{body}<xdr:clientData/></xdr:twoCellAnchor>"
            )
        elif kind == "oneCell":
            anchors.append(
                f'<xdr:oneCellAnchor>{_marker("from", metrics, x, y)}<xdr:ext cx="{cx}" cy="{cy}"/>'
                f"{body}<xdr:clientData/></xdr:oneCellAnchor>"
            )
        elif kind == "absolute":
            anchors.append(
                f'<xdr:absoluteAnchor><xdr:pos x="{x}" y="{y}"/><xdr:ext cx="{cx}" cy="{cy}"/>'
                f"{body}<xdr:clientData/></xdr:absoluteAnchor>"
            )
        else:
            raise InvalidManifestError(f"{obj.get('id')}: unknown anchor {kind!r}")
    return XML_DECL + f'<xdr:wsDr xmlns:xdr="{NS_XDR}" xmlns:a="{NS_A}">' + "".join(anchors) + "</xdr:wsDr>"


def worksheet_xml(sheet: dict, has_drawing: bool) -> str:
    fmt = f'<sheetFormatPr defaultRowHeight="{sheet.get("default_row_height", DEFAULT_ROW_HEIGHT_PT)}"'
    if "default_col_width" in sheet:
        fmt += f' defaultColWidth="{sheet["default_col_width"]}"'
    fmt += "/>"
    cols = ""
    if sheet.get("cols"):
        items = []
        for c in sheet["cols"]:
            hidden = ' hidden="1"' if c.get("hidden") else ""
            items.append(f'<col min="{c["min"]}" max="{c.get("max", c["min"])}" width="{c["width"]}" customWidth="1"{hidden}/>')
        cols = "<cols>" + "".join(items) + "</cols>"
    rows = []
    for r in sorted(sheet.get("rows", []), key=lambda r: r["r"]):
        hidden = ' hidden="1"' if r.get("hidden") else ""
        rows.append(f'<row r="{r["r"]}" ht="{r["ht"]}" customHeight="1"{hidden}/>')
    drawing = '<drawing r:id="rId1"/>' if has_drawing else ""
    return (
        XML_DECL + f'<worksheet xmlns="{NS_MAIN}" xmlns:r="{NS_R}">{fmt}{cols}'
        f"<sheetData>{''.join(rows)}</sheetData>{drawing}</worksheet>"
    )


def theme_xml(palette: dict[str, str]) -> str:
    slots = []
    for name in SCHEME_SLOTS:
        if name not in palette:
            continue
        value = palette[name].lstrip("#").upper()
        if name == "dk1":
            slots.append(f'<a:dk1><a:sysClr val="windowText" lastClr="{value}"/></a:dk1>')
        elif name == "lt1":
            slots.append(f'<a:lt1><a:sysClr val="window" lastClr="{value}"/></a:lt1>')
        else:
            slots.append(f'<a:{name}><a:srgbClr val="{value}"/></a:{name}>')
    return (
        XML_DECL + f'<a:theme xmlns:a="{NS_A}" name="Office Theme"><a:themeElements>'
        f'<a:clrScheme name="Office">{"".join(slots)}</a:clrScheme>'
        "</a:themeElements></a:theme>"
    )


def _rels(items: list[tuple[str, str, str]]) -> str:
    body = "".join(f'<Relationship Id="{rid}" Type="{REL}{kind}" Target="{target}"/>' for rid, kind, target in items)
    return XML_DECL + f'<Relationships xmlns="{NS_PKG_RELS}">{body}</Relationships>'


def forge_parts(manifest: dict) -> dict[str, bytes]:
    """All package parts of the manifest, keyed by zip path.

    Raises:
        InvalidManifestError: the manifest fails :func:`lint_manifest`.
    """
    problems = lint_manifest(manifest)
    if problems:
        raise InvalidManifestError("; ".join(problems))

    palette = manifest["theme"] if "theme" in manifest else OFFICE_PALETTE
    parts: dict[str, str] = {}
    overrides = [
        ("/xl/workbook.xml", CT + "spreadsheetml.sheet.main+xml"),
    ]
    wb_rels = []
    sheets_xml = []
    drawing_no = 0
    for i, sheet in enumerate(manifest["sheets"], start=1):
        has_drawing = bool(sheet.get("objects"))
        parts[f"xl/worksheets/sheet{i}.xml"] = worksheet_xml(sheet, has_drawing)
        overrides.append((f"/xl/worksheets/sheet{i}.xml", CT + "spreadsheetml.worksheet+xml"))
        wb_rels.append((f"rId{i}", "worksheet", f"worksheets/sheet{i}.xml"))
        sheets_xml.append(f'<sheet name={quoteattr(sheet.get("name", f"Sheet{i}"))} sheetId="{i}" r:id="rId{i}"/>')
        if has_drawing:
            drawing_no += 1
            parts[f"xl/drawings/drawing{drawing_no}.xml"] = drawing_xml(sheet)
            parts[f"xl/worksheets/_rels/sheet{i}.xml.rels"] = _rels([("rId1", "drawing", f"../drawings/drawing{drawing_no}.xml")])
            overrides.append((f"/xl/drawings/drawing{drawing_no}.xml", CT + "drawing+xml"))
    if palette is not None:
        parts["xl/theme/theme1.xml"] = theme_xml(palette)
        overrides.append(("/xl/theme/theme1.xml", CT + "theme+xml"))
        wb_rels.append((f"rId{len(manifest['sheets']) + 1}", "theme", "theme/theme1.xml"))

    parts["xl/workbook.xml"] = (
        XML_DECL + f'<workbook xmlns="{NS_MAIN}" xmlns:r="{NS_R}"><sheets>{"".join(sheets_xml)}</sheets></workbook>'
    )
    parts["xl/_rels/workbook.xml.rels"] = _rels(wb_rels)
    parts["_rels/.rels"] = _rels([("rId1", "officeDocument", "xl/workbook.xml")])
    ct = "".join(f'<Override PartName="{name}" ContentType="{kind}"/>' for name, kind in overrides)
    parts["[Content_Types].xml"] = (
        XML_DECL + '<Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types">'
        '<Default Extension="rels" ContentType="application/vnd.openxmlformats-package.relationships+xml"/>'
        f'<Default Extension="xml" ContentType="application/xml"/>{ct}</Types>'
    )
    return {name: text.encode("utf-8") for name, text in parts.items()}


def zip_parts(parts: dict[str, bytes]) -> bytes:
    """Deterministic zip: fixed timestamps, content types first, then sorted names."""
    buf = io.BytesIO()
    order = sorted(parts, key=lambda n: (n != "[Content_Types].xml", n))
    with zipfile.ZipFile(buf, "w") as zf:
        for name in order:
            info = zipfile.ZipInfo(name, ZIP_DATE)
            info.compress_type = zipfile.ZIP_DEFLATED
            info.external_attr = 0o644 << 16
            zf.writestr(info, parts[name])
    return buf.getvalue()


def forge(manifest: dict) -> bytes:
    """``.xlsx`` bytes for a manifest.

    Raises:
        InvalidManifestError: the manifest is inconsistent.
    """
    return zip_parts(forge_parts(manifest))


def expected_group_child_placement(group: dict, child: dict) -> XfrmSpec:
    """Group xfrm as written for ``group``; handy for tests that recompute child frames."""
    frame = _frame(group["frame"])
    ch = _frame(group.get("child_frame", group["frame"]))
    return XfrmSpec(
        off=(frame.x, frame.y),
        ext=(frame.cx, frame.cy),
        rot=_rot(group),
        flip_h=group.get("flip_h", False),
        flip_v=group.get("flip_v", False),
        ch_off=(ch.x, ch.y),
        ch_ext=(ch.cx, ch.cy),
    )
