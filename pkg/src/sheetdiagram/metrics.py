"""Column widths, row heights and anchor-to-EMU resolution for one worksheet."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping
from xml.etree import ElementTree as ET

from .drawingml import AnchorSpec, CellMarker
from .errors import Diagnostic, MalformedXmlError, report
from .units import DEFAULT_MDW_PX, EMU_PER_PT, EMU_PER_PX

# 8.43 visible characters plus 5 px of cell padding, as stored in ``col@width``
DEFAULT_COL_WIDTH_CHARS = 2340 / 256
DEFAULT_ROW_HEIGHT_PT = 15.0


def column_width_px(width_chars: float, mdw: int = DEFAULT_MDW_PX) -> int:
    """Pixel width of a column whose stored width is ``width_chars`` characters."""
    return math.floor(((256 * width_chars + math.floor(128 / mdw)) / 256) * mdw)


def stored_width_from_visible(chars: float, mdw: int = DEFAULT_MDW_PX) -> float:
    """Convert a visible character count (e.g. 8.43) into the stored column width."""
    return math.trunc((chars * mdw + 5) / mdw * 256) / 256


@dataclass(frozen=True)
class FrameEmu:
    x: float
    y: float
    cx: float
    cy: float

    @property
    def center(self) -> tuple[float, float]:
        return self.x + self.cx / 2, self.y + self.cy / 2


@dataclass(frozen=True)
class SheetMetrics:
    default_col_width_chars: float = DEFAULT_COL_WIDTH_CHARS
    default_row_height_pt: float = DEFAULT_ROW_HEIGHT_PT
    col_width_overrides: Mapping[int, float] = field(default_factory=dict)
    row_height_overrides: Mapping[int, float] = field(default_factory=dict)
    mdw_px: int = DEFAULT_MDW_PX

    @cached_property
    def _col_prefix(self) -> tuple[list[int], list[int]]:
        return _prefix_deltas(
            self.col_width_overrides, lambda w: _col_emu(w, self.mdw_px), self.default_col_emu
        )

    @cached_property
    def _row_prefix(self) -> tuple[list[int], list[int]]:
        return _prefix_deltas(self.row_height_overrides, _row_emu, self.default_row_emu)

    @property
    def default_col_emu(self) -> int:
        return _col_emu(self.default_col_width_chars, self.mdw_px)

    @property
    def default_row_emu(self) -> int:
        return _row_emu(self.default_row_height_pt)

    def col_origin(self, col: int) -> int:
        """Left edge of ``col`` in EMU: the sum of all preceding column widths."""
        keys, deltas = self._col_prefix
        return col * self.default_col_emu + deltas[bisect.bisect_left(keys, col)]

    def row_origin(self, row: int) -> int:
        keys, deltas = self._row_prefix
        return row * self.default_row_emu + deltas[bisect.bisect_left(keys, row)]


def _col_emu(width_chars: float, mdw: int) -> int:
    return column_width_px(width_chars, mdw) * EMU_PER_PX


def _row_emu(height_pt: float) -> int:
    return int(round(height_pt * EMU_PER_PT))


def _prefix_deltas(overrides: Mapping[int, float], to_emu, default_emu: int) -> tuple[list[int], list[int]]:
    # deltas[i] = sum over the first i overridden indices of (override - default)
    keys = sorted(overrides)
    deltas = [0]
    for k in keys:
        deltas.append(deltas[-1] + to_emu(overrides[k]) - default_emu)
    return keys, deltas


def col_width_emu(metrics: SheetMetrics, col: int) -> int:
    width = metrics.col_width_overrides.get(col, metrics.default_col_width_chars)
    return _col_emu(width, metrics.mdw_px)


def row_height_emu(metrics: SheetMetrics, row: int) -> int:
    return _row_emu(metrics.row_height_overrides.get(row, metrics.default_row_height_pt))


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_sheet_metrics(
    sheet_xml: bytes | None,
    mdw_px: int = DEFAULT_MDW_PX,
    diagnostics: list[Diagnostic] | None = None,
) -> SheetMetrics:
    """Read ``sheetFormatPr``, ``cols`` and row heights from worksheet XML.

    ``col`` ranges are expanded to 0-based indices; hidden columns and rows get
    zero size. Without ``sheetFormatPr`` the Excel defaults apply: 8.43 visible
    characters per column and 15 pt per row.

    Raises:
        MalformedXmlError: ``sheet_xml`` is not well-formed.
    """
    if sheet_xml is None:
        return SheetMetrics(mdw_px=mdw_px)
    try:
        root = ET.fromstring(sheet_xml)
    except ET.ParseError as exc:
        raise MalformedXmlError(f"worksheet: {exc}") from exc

    default_col = DEFAULT_COL_WIDTH_CHARS
    default_row = DEFAULT_ROW_HEIGHT_PT
    cols: dict[int, float] = {}
    rows: dict[int, float] = {}

    for el in root:
        name = _local(el.tag)
        if name == "sheetFormatPr":
            if el.get("defaultColWidth") is not None:
                default_col = float(el.get("defaultColWidth"))
            elif el.get("baseColWidth") is not None:
                default_col = stored_width_from_visible(float(el.get("baseColWidth")), mdw_px)
            if el.get("defaultRowHeight") is not None:
                default_row = float(el.get("defaultRowHeight"))
        elif name == "cols":
            for col in el:
                if _local(col.tag) != "col":
                    continue
                lo = int(col.get("min", "1"))
                hi = int(col.get("max", str(lo)))
                hidden = col.get("hidden", "0") in ("1", "true")
                width = 0.0 if hidden else float(col.get("width", default_col))
                for c in range(lo - 1, hi):
                    if c in cols:
                        report(diagnostics, "warning", "OverlappingColumns", f"column {c} declared twice")
                    cols[c] = width
        elif name == "sheetData":
            for row in el:
                if _local(row.tag) != "row" or row.get("r") is None:
                    continue
                r = int(row.get("r")) - 1
                if row.get("hidden", "0") in ("1", "true"):
                    rows[r] = 0.0
                elif row.get("ht") is not None:
                    rows[r] = float(row.get("ht"))

    return SheetMetrics(
        default_col_width_chars=default_col,
        default_row_height_pt=default_row,
        col_width_overrides=cols,
        row_height_overrides=rows,
        mdw_px=mdw_px,
    )


def cell_origin(metrics: SheetMetrics, marker: CellMarker) -> tuple[int, int]:
    return (
        metrics.col_origin(marker.col) + marker.col_off,
        metrics.row_origin(marker.row) + marker.row_off,
    )


def resolve_anchor(
    metrics: SheetMetrics, anchor: AnchorSpec, diagnostics: list[Diagnostic] | None = None
) -> FrameEmu:
    """Absolute frame (EMU) described by an anchor.

    A two-cell anchor whose ``to`` marker precedes ``from`` is clamped to zero
    extent with a ``NegativeExtent`` diagnostic.
    """
    if anchor.kind == "absolute":
        x, y = anchor.pos or (0, 0)
        cx, cy = anchor.ext or (0, 0)
        return FrameEmu(x, y, cx, cy)

    x, y = cell_origin(metrics, anchor.from_cell or CellMarker(0, 0))
    if anchor.kind == "oneCell":
        cx, cy = anchor.ext or (0, 0)
        return FrameEmu(x, y, cx, cy)

    x2, y2 = cell_origin(metrics, anchor.to_cell or anchor.from_cell or CellMarker(0, 0))
    if x2 < x or y2 < y:
        report(diagnostics, "warning", "NegativeExtent", "anchor 'to' precedes 'from'; extent clamped to 0")
    return FrameEmu(x, y, max(x2 - x, 0), max(y2 - y, 0))
