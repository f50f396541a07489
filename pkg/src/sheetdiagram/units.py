"""Length units used throughout the package.

All drawing geometry is stored in integer EMU inside the XML and converted to
typographic points (Pt) only when a rendered coordinate is produced.
"""

EMU_PER_INCH = 914400
EMU_PER_PT = 12700
EMU_PER_PX = 9525  # 96 DPI
DEFAULT_MDW_PX = 7  # maximum digit width of Calibri 11

ANGLE_UNITS_PER_DEGREE = 60000
FULL_TURN = 360 * ANGLE_UNITS_PER_DEGREE
PERCENT_SCALE = 100000


def emu_to_pt(emu: float) -> float:
    return emu / EMU_PER_PT


def pt_to_emu(pt: float) -> int:
    return int(round(pt * EMU_PER_PT))


def px_to_emu(px: int) -> int:
    return px * EMU_PER_PX


def normalize_rotation(rot: int) -> int:
    """Fold a rotation in 1/60000 degree units into ``[0, 21600000)``."""
    return rot % FULL_TURN


def rotation_degrees(rot: int) -> float:
    return rot / ANGLE_UNITS_PER_DEGREE
