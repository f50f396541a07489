"""Rendered geometry: group flattening, rotated bounding boxes, connector paths.

Coordinates follow the sheet convention: origin at the top-left, y grows
downward, positive rotation is clockwise. DrawingML renders a shape by
mirroring its local geometry within the frame (flips), rotating about the
frame center and finally placing the frame.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .drawingml import XfrmSpec
from .errors import Diagnostic, report
from .metrics import FrameEmu
from .units import ANGLE_UNITS_PER_DEGREE, EMU_PER_PT, FULL_TURN, PERCENT_SCALE

QUARTER_TURN = FULL_TURN // 4


class PtPoint(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class BBox:
    left: float
    right: float
    top: float
    bottom: float

    @property
    def width(self) -> float:
        return self.right - self.left

    @property
    def height(self) -> float:
        return self.bottom - self.top

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> PtPoint:
        return PtPoint((self.left + self.right) / 2, (self.top + self.bottom) / 2)

    def union(self, other: "BBox") -> "BBox":
        return BBox(
            min(self.left, other.left),
            max(self.right, other.right),
            min(self.top, other.top),
            max(self.bottom, other.bottom),
        )

    def intersection_area(self, other: "BBox") -> float:
        w = min(self.right, other.right) - max(self.left, other.left)
        h = min(self.bottom, other.bottom) - max(self.top, other.top)
        return w * h if w > 0 and h > 0 else 0.0

    def contains(self, p: PtPoint) -> bool:
        return self.left <= p.x <= self.right and self.top <= p.y <= self.bottom

    def distance_to(self, p: PtPoint) -> float:
        dx = max(self.left - p.x, 0.0, p.x - self.right)
        dy = max(self.top - p.y, 0.0, p.y - self.bottom)
        return math.hypot(dx, dy)

    def translated(self, dx: float, dy: float) -> "BBox":
        return BBox(self.left + dx, self.right + dx, self.top + dy, self.bottom + dy)


class CardinalDirection(str, enum.Enum):
    N = "N"
    E = "E"
    S = "S"
    W = "W"


@dataclass(frozen=True)
class ConnectorPath:
    points: tuple[PtPoint, ...]
    start_dir: CardinalDirection
    end_dir: CardinalDirection

    @property
    def start(self) -> PtPoint:
        return self.points[0]

    @property
    def end(self) -> PtPoint:
        return self.points[-1]

    @property
    def bends(self) -> tuple[PtPoint, ...]:
        return self.points[1:-1]


class DegenerateGroupError(ValueError):
    pass


def _cos_sin(rot: float) -> tuple[float, float]:
    rot = rot % FULL_TURN
    if rot % QUARTER_TURN == 0:
        return {0: (1.0, 0.0), 1: (0.0, 1.0), 2: (-1.0, 0.0), 3: (0.0, -1.0)}[int(rot // QUARTER_TURN)]
    theta = math.radians(rot / ANGLE_UNITS_PER_DEGREE)
    return math.cos(theta), math.sin(theta)


def rotate_points(
    points: Iterable[tuple[float, float]], center: tuple[float, float], rot: float
) -> list[PtPoint]:
    """Rotate clockwise (y down) by ``rot`` in 1/60000 degree units about ``center``."""
    c, s = _cos_sin(rot)
    cx, cy = center
    out = []
    for x, y in points:
        dx, dy = x - cx, y - cy
        out.append(PtPoint(cx + dx * c - dy * s, cy + dx * s + dy * c))
    return out


def mirror_points(
    points: Iterable[tuple[float, float]],
    center: tuple[float, float],
    flip_h: bool = False,
    flip_v: bool = False,
) -> list[PtPoint]:
    """Reflect across the vertical (``flip_h``) and/or horizontal axis through ``center``."""
    cx, cy = center
    return [
        PtPoint(2 * cx - x if flip_h else x, 2 * cy - y if flip_v else y)
        for x, y in points
    ]


def render_local(
    local: Sequence[tuple[float, float]],
    frame: FrameEmu,
    rot: float = 0,
    flip_h: bool = False,
    flip_v: bool = False,
) -> list[PtPoint]:
    """Map frame-local EMU points to sheet EMU: flip, rotate about the center, translate."""
    half = (frame.cx / 2, frame.cy / 2)
    pts = mirror_points(local, half, flip_h, flip_v)
    pts = rotate_points(pts, half, rot)
    return [PtPoint(x + frame.x, y + frame.y) for x, y in pts]


def _quarter_turned(rot: float) -> bool:
    deg = (rot % FULL_TURN) / ANGLE_UNITS_PER_DEGREE
    return 45 <= deg < 135 or 225 <= deg < 315


def flatten_group(
    parent: XfrmSpec,
    child_frame: FrameEmu,
    child_rot: float = 0,
    child_flip_h: bool = False,
    child_flip_v: bool = False,
) -> tuple[FrameEmu, float, bool, bool]:
    """Express a group child in the coordinate space the group itself lives in.

    ``parent.off``/``parent.ext`` is the group's frame and ``ch_off``/``ch_ext``
    the child coordinate space mapped onto it. The result is exact for uniform
    group scaling or for children turned by a multiple of 90 degrees; other
    combinations would shear the child, and the child's extents are then
    scaled along its own nearest axes.

    Raises:
        DegenerateGroupError: a child extent of zero maps onto a non-zero extent.
    """
    off = parent.off or (0, 0)
    ext = parent.ext or (0, 0)
    ch_off = parent.ch_off or off
    ch_ext = parent.ch_ext or ext

    scales = []
    for e, ce in zip(ext, ch_ext):
        if ce == 0:
            if e != 0:
                raise DegenerateGroupError("group child extent is zero")
            scales.append(1.0)
        else:
            scales.append(e / ce)
    sx, sy = scales

    ccx, ccy = child_frame.center
    ccx = off[0] + (ccx - ch_off[0]) * sx
    ccy = off[1] + (ccy - ch_off[1]) * sy
    if _quarter_turned(child_rot):
        # the child's local x axis lies along the group's y axis
        cx, cy = child_frame.cx * sy, child_frame.cy * sx
    else:
        cx, cy = child_frame.cx * sx, child_frame.cy * sy

    group_center = (off[0] + ext[0] / 2, off[1] + ext[1] / 2)
    (ccx, ccy), = mirror_points([(ccx, ccy)], group_center, parent.flip_h, parent.flip_v)
    (ccx, ccy), = rotate_points([(ccx, ccy)], group_center, parent.rot)

    mirrored_once = parent.flip_h != parent.flip_v
    rot = (parent.rot + (-child_rot if mirrored_once else child_rot)) % FULL_TURN
    frame = FrameEmu(ccx - cx / 2, ccy - cy / 2, cx, cy)
    return frame, rot, child_flip_h != parent.flip_h, child_flip_v != parent.flip_v


def rendered_bbox(frame: FrameEmu, rot: float = 0, flip_h: bool = False, flip_v: bool = False) -> BBox:
    """Axis-aligned envelope of the rotated frame, in points.

    Flips mirror the frame onto itself and therefore never change the box.
    """
    corners = [(0, 0), (frame.cx, 0), (frame.cx, frame.cy), (0, frame.cy)]
    pts = render_local(corners, frame, rot)
    xs = [p.x for p in pts]
    ys = [p.y for p in pts]
    return BBox(min(xs) / EMU_PER_PT, max(xs) / EMU_PER_PT, min(ys) / EMU_PER_PT, max(ys) / EMU_PER_PT)


# default adjust values of the bent connector presets (presetShapeDefinitions)
BENT_DEFAULTS = {
    "bentConnector3": {"adj1": 50000},
    "bentConnector4": {"adj1": 50000, "adj2": 50000},
    "bentConnector5": {"adj1": 50000, "adj2": 50000, "adj3": 50000},
}


def local_connector_points(
    preset: str, cx: float, cy: float, adjustments: Iterable[tuple[str, int]] = ()
) -> list[tuple[float, float]] | None:
    """Unrotated, unflipped connector polyline in frame-local EMU; ``None`` if unsupported."""
    if preset in ("straightConnector1", "line"):
        return [(0, 0), (cx, cy)]
    if preset == "bentConnector2":
        return [(0, 0), (cx, 0), (cx, cy)]
    if preset not in BENT_DEFAULTS:
        return None
    adj = dict(BENT_DEFAULTS[preset])
    adj.update((k, v) for k, v in adjustments if k in adj)
    x1 = cx * adj["adj1"] / PERCENT_SCALE
    if preset == "bentConnector3":
        return [(0, 0), (x1, 0), (x1, cy), (cx, cy)]
    y2 = cy * adj["adj2"] / PERCENT_SCALE
    if preset == "bentConnector4":
        return [(0, 0), (x1, 0), (x1, y2), (cx, y2), (cx, cy)]
    x3 = cx * adj["adj3"] / PERCENT_SCALE
    return [(0, 0), (x1, 0), (x1, y2), (x3, y2), (x3, cy), (cx, cy)]


def _dedupe(points: Sequence[PtPoint]) -> list[PtPoint]:
    out = [points[0]]
    for p in points[1:]:
        if p != out[-1]:
            out.append(p)
    if len(out) == 1:
        out.append(points[-1])
    return out


def quantize_direction(dx: float, dy: float) -> CardinalDirection:
    """Nearest cardinal of a vector (y down); exact diagonals resolve horizontally."""
    if abs(dx) >= abs(dy):
        return CardinalDirection.E if dx >= 0 else CardinalDirection.W
    return CardinalDirection.S if dy > 0 else CardinalDirection.N


def endpoint_direction(
    points: Sequence[tuple[float, float]],
    end: str = "end",
    diagnostics: list[Diagnostic] | None = None,
) -> CardinalDirection:
    """Outward direction of a connector endpoint, i.e. toward the shape it meets.

    Only the terminal segment counts: the start endpoint faces opposite to the
    first segment's travel, the end endpoint along the last segment's travel.
    Zero-length terminal segments are skipped; an entirely degenerate path
    yields ``E`` with a ``DegeneratePath`` diagnostic.
    """
    pts = list(points)
    if end == "start":
        x0, y0 = pts[0]
        nxt = next((p for p in pts[1:] if tuple(p) != (x0, y0)), None)
        if nxt is not None:
            return quantize_direction(x0 - nxt[0], y0 - nxt[1])
    elif end == "end":
        xn, yn = pts[-1]
        prev = next((p for p in reversed(pts[:-1]) if tuple(p) != (xn, yn)), None)
        if prev is not None:
            return quantize_direction(xn - prev[0], yn - prev[1])
    else:
        raise ValueError(f"end must be 'start' or 'end', not {end!r}")
    report(diagnostics, "warning", "DegeneratePath", "connector has zero length; direction defaults to E")
    return CardinalDirection.E


def connector_path(
    frame: FrameEmu,
    preset: str,
    rot: float = 0,
    flip_h: bool = False,
    flip_v: bool = False,
    adjustments: Iterable[tuple[str, int]] = (),
    diagnostics: list[Diagnostic] | None = None,
) -> ConnectorPath:
    """Rendered connector polyline in points with both endpoint directions.

    Unsupported presets fall back to a straight line between frame corners.
    """
    local = local_connector_points(preset, frame.cx, frame.cy, adjustments)
    if local is None:
        report(diagnostics, "warning", "UnsupportedPreset", f"connector preset {preset!r} drawn as a straight line")
        local = [(0, 0), (frame.cx, frame.cy)]
    emu = render_local(local, frame, rot, flip_h, flip_v)
    pts = _dedupe([PtPoint(x / EMU_PER_PT, y / EMU_PER_PT) for x, y in emu])
    return ConnectorPath(
        tuple(pts),
        endpoint_direction(pts, "start", diagnostics),
        endpoint_direction(pts, "end"),
    )


def point_segment_distance(p: tuple[float, float], a: tuple[float, float], b: tuple[float, float]) -> float:
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    if L2 == 0:
        return math.hypot(p[0] - ax, p[1] - ay)
    t = max(0.0, min(1.0, ((p[0] - ax) * dx + (p[1] - ay) * dy) / L2))
    return math.hypot(p[0] - (ax + t * dx), p[1] - (ay + t * dy))


def polyline_distance(p: tuple[float, float], points: Sequence[tuple[float, float]]) -> float:
    if len(points) == 1:
        return math.hypot(p[0] - points[0][0], p[1] - points[0][1])
    return min(point_segment_distance(p, a, b) for a, b in zip(points, points[1:]))


def ray_hit_distance(p: PtPoint, direction: CardinalDirection, box: BBox) -> float | None:
    """Distance along an axis-aligned ray from ``p`` to the first point of ``box``."""
    if direction in (CardinalDirection.E, CardinalDirection.W):
        if not box.top <= p.y <= box.bottom:
            return None
        d = box.left - p.x if direction is CardinalDirection.E else p.x - box.right
    else:
        if not box.left <= p.x <= box.right:
            return None
        d = box.top - p.y if direction is CardinalDirection.S else p.y - box.bottom
    return d if d >= 0 else None
