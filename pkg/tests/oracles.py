"""Reference implementations written independently of the package code.

Each oracle takes the slow, obvious route: stdlib ``colorsys`` for HSL math,
explicit loops for cumulative sizes, dot products for direction snapping and
plain affine matrices for group transforms.
"""

from __future__ import annotations

import colorsys
import math

EMU_PER_PT = 12700
EMU_PER_PX = 9525


# --- colors ---------------------------------------------------------------


def _rgb_to_hls(r, g, b):
    # colorsys in older Pythons divides by zero for max + min == 2 in floats
    if max(r, g, b) + min(r, g, b) >= 2.0:
        return 0.0, 1.0, 0.0
    return colorsys.rgb_to_hls(r, g, b)


def color_chain(hex_rgb: str, transforms) -> tuple[int, int, int, int]:
    r, g, b = (int(hex_rgb[i:i + 2], 16) / 255 for i in (0, 2, 4))
    a = 1.0
    for op, val in transforms:
        f = val / 100000
        if op == "tint":
            r, g, b = (min(max(c * f + (1 - f), 0), 1) for c in (r, g, b))
        elif op == "shade":
            r, g, b = (min(max(c * f, 0), 1) for c in (r, g, b))
        elif op == "alpha":
            a = min(max(f, 0), 1)
        else:
            h, lum, s = _rgb_to_hls(r, g, b)
            if op == "lumMod":
                lum = min(max(lum * f, 0), 1)
            elif op == "lumOff":
                lum = min(max(lum + f, 0), 1)
            elif op == "satMod":
                s = min(max(s * f, 0), 1)
            r, g, b = (min(max(c, 0), 1) for c in colorsys.hls_to_rgb(h, lum, s))
    return tuple(int(round(c * 255)) for c in (r, g, b, a))


# --- sheet metrics --------------------------------------------------------


def col_px(width_chars: float, mdw: int = 7) -> int:
    # the documented truncation formula, spelled out
    return math.floor((256 * width_chars + math.floor(128 / mdw)) / 256 * mdw)


def col_origin(col: int, default_chars: float, overrides: dict, mdw: int = 7) -> int:
    total = 0
    for c in range(col):
        total += col_px(overrides.get(c, default_chars), mdw) * EMU_PER_PX
    return total


def row_origin(row: int, default_pt: float, overrides: dict) -> int:
    total = 0
    for r in range(row):
        total += int(round(overrides.get(r, default_pt) * EMU_PER_PT))
    return total


# --- directions -----------------------------------------------------------

CARDINALS = [("E", (1, 0)), ("N", (0, -1)), ("W", (-1, 0)), ("S", (0, 1))]


def nearest_cardinal(dx: int, dy: int) -> str:
    """Largest dot product wins; a tie prefers the horizontal direction."""
    best = None
    for name, (ux, uy) in CARDINALS:
        score = dx * ux + dy * uy
        horizontal = ux != 0
        key = (score, horizontal)
        if best is None or key > best[0]:
            best = (key, name)
    return best[1]


# --- affine transforms ----------------------------------------------------


def mat_mul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)] for i in range(3)]


def translate(tx, ty):
    return [[1, 0, tx], [0, 1, ty], [0, 0, 1]]


def scale(sx, sy):
    return [[sx, 0, 0], [0, sy, 0], [0, 0, 1]]


def rotate_cw(deg):
    t = math.radians(deg)
    c, s = math.cos(t), math.sin(t)
    return [[c, -s, 0], [s, c, 0], [0, 0, 1]]


def apply(m, pts):
    return [(m[0][0] * x + m[0][1] * y + m[0][2], m[1][0] * x + m[1][1] * y + m[1][2]) for x, y in pts]


def shape_matrix(x, y, cx, cy, rot_deg, flip_h, flip_v):
    """Frame-local point -> parent space for a shape with the given xfrm."""
    hx, hy = cx / 2, cy / 2
    m = translate(-hx, -hy)
    m = mat_mul(scale(-1 if flip_h else 1, -1 if flip_v else 1), m)
    m = mat_mul(rotate_cw(rot_deg), m)
    return mat_mul(translate(x + hx, y + hy), m)


def group_matrix(off, ext, ch_off, ch_ext, rot_deg, flip_h, flip_v):
    """Child coordinate space -> the group's parent space."""
    sx = ext[0] / ch_ext[0]
    sy = ext[1] / ch_ext[1]
    m = mat_mul(scale(sx, sy), translate(-ch_off[0], -ch_off[1]))
    m = mat_mul(translate(off[0], off[1]), m)
    # the group's own flip/rotation act about the center of its frame
    return mat_mul(shape_matrix(off[0], off[1], ext[0], ext[1], rot_deg, flip_h, flip_v),
                   mat_mul(translate(-off[0], -off[1]), m))
