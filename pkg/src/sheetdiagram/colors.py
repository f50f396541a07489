"""Theme palettes and resolution of DrawingML color specs to concrete RGBA."""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping
from xml.etree import ElementTree as ET

from .drawingml import NO_COLOR, ColorSpec
from .errors import Diagnostic, MalformedXmlError, report
from .units import PERCENT_SCALE

SCHEME_SLOTS = (
    "dk1", "lt1", "dk2", "lt2",
    "accent1", "accent2", "accent3", "accent4", "accent5", "accent6",
    "hlink", "folHlink",
)
SCHEME_ALIASES = {"tx1": "dk1", "bg1": "lt1", "tx2": "dk2", "bg2": "lt2"}

# Office 2013+ default theme
OFFICE_PALETTE = {
    "dk1": "000000",
    "lt1": "FFFFFF",
    "dk2": "44546A",
    "lt2": "E7E6E6",
    "accent1": "4472C4",
    "accent2": "ED7D31",
    "accent3": "A5A5A5",
    "accent4": "FFC000",
    "accent5": "5B9BD5",
    "accent6": "70AD47",
    "hlink": "0563C1",
    "folHlink": "954F72",
}

SYSTEM_COLORS = {"windowText": "000000", "window": "FFFFFF", "btnFace": "F0F0F0", "highlight": "0078D7"}


@dataclass(frozen=True)
class ResolvedColor:
    r: int
    g: int
    b: int
    a: int = 255

    def __post_init__(self):
        for name in ("r", "g", "b", "a"):
            v = getattr(self, name)
            if not isinstance(v, int) or not 0 <= v <= 255:
                raise ValueError(f"channel {name}={v!r} outside 0..255")

    def to_hex(self) -> str:
        """``#RRGGBB``, or ``#RRGGBBAA`` when not fully opaque."""
        text = f"#{self.r:02X}{self.g:02X}{self.b:02X}"
        return text + f"{self.a:02X}" if self.a < 255 else text


BLACK = ResolvedColor(0, 0, 0)


@dataclass(frozen=True)
class ThemePalette:
    slots: Mapping[str, str]

    @classmethod
    def office(cls) -> "ThemePalette":
        return cls(MappingProxyType(dict(OFFICE_PALETTE)))

    def lookup(self, name: str) -> str | None:
        return self.slots.get(SCHEME_ALIASES.get(name, name))


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_theme(theme_xml: bytes, diagnostics: list[Diagnostic] | None = None) -> ThemePalette:
    """Read the ``clrScheme`` of a theme part.

    Missing slots are filled from the Office default palette with a
    ``MissingSlot`` diagnostic each.

    Raises:
        MalformedXmlError: ``theme_xml`` is not well-formed.
    """
    try:
        root = ET.fromstring(theme_xml)
    except ET.ParseError as exc:
        raise MalformedXmlError(f"theme: {exc}") from exc

    scheme = next((el for el in root.iter() if _local(el.tag) == "clrScheme"), None)
    slots: dict[str, str] = {}
    if scheme is not None:
        for slot in scheme:
            name = _local(slot.tag)
            if name not in SCHEME_SLOTS:
                continue
            for c in slot:
                kind = _local(c.tag)
                if kind == "srgbClr" and c.get("val"):
                    slots[name] = c.get("val").upper()
                elif kind == "sysClr":
                    value = c.get("lastClr") or SYSTEM_COLORS.get(c.get("val", ""))
                    if value:
                        slots[name] = value.upper()
    for name in SCHEME_SLOTS:
        if name not in slots:
            report(diagnostics, "warning", "MissingSlot", f"theme slot {name} missing; Office default used")
            slots[name] = OFFICE_PALETTE[name]
    return ThemePalette(MappingProxyType(slots))


def _hex_rgb(value: str) -> tuple[float, float, float] | None:
    try:
        n = int(value, 16)
    except ValueError:
        return None
    if len(value) != 6:
        return None
    return float(n >> 16 & 0xFF), float(n >> 8 & 0xFF), float(n & 0xFF)


def rgb_to_hsl(r: float, g: float, b: float) -> tuple[float, float, float]:
    """Channels in ``[0, 255]`` to hue in ``[0, 1)``, saturation and luminance in ``[0, 1]``."""
    r, g, b = r / 255, g / 255, b / 255
    hi, lo = max(r, g, b), min(r, g, b)
    lum = (hi + lo) / 2
    if hi == lo:
        return 0.0, 0.0, lum
    d = hi - lo
    sat = d / (hi + lo) if lum <= 0.5 else d / (2 - hi - lo)
    if hi == r:
        hue = (g - b) / d % 6
    elif hi == g:
        hue = (b - r) / d + 2
    else:
        hue = (r - g) / d + 4
    return hue / 6, sat, lum


def hsl_to_rgb(h: float, s: float, lum: float) -> tuple[float, float, float]:
    chroma = (1 - abs(2 * lum - 1)) * s
    hp = (h % 1.0) * 6
    x = chroma * (1 - abs(hp % 2 - 1))
    sector = int(hp) % 6
    r, g, b = [
        (chroma, x, 0), (x, chroma, 0), (0, chroma, x),
        (0, x, chroma), (x, 0, chroma), (chroma, 0, x),
    ][sector]
    m = lum - chroma / 2
    return (r + m) * 255, (g + m) * 255, (b + m) * 255


def _clamp(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v


def apply_transform(
    rgb: tuple[float, float, float], alpha: float, op: str, amount: int
) -> tuple[tuple[float, float, float], float]:
    """One color transform step; channels stay unrounded floats in ``[0, 255]``."""
    f = amount / PERCENT_SCALE
    if op == "alpha":
        return rgb, _clamp(f * 255, 0, 255)
    if op == "tint":
        return tuple(_clamp(c * f + (1 - f) * 255, 0, 255) for c in rgb), alpha
    if op == "shade":
        return tuple(_clamp(c * f, 0, 255) for c in rgb), alpha
    h, s, lum = rgb_to_hsl(*rgb)
    if op == "lumMod":
        lum = _clamp(lum * f, 0, 1)
    elif op == "lumOff":
        lum = _clamp(lum + f, 0, 1)
    elif op == "satMod":
        s = _clamp(s * f, 0, 1)
    else:
        raise ValueError(f"unsupported color transform {op!r}")
    return tuple(_clamp(c, 0, 255) for c in hsl_to_rgb(h, s, lum)), alpha


def resolve_color(
    spec: ColorSpec, palette: ThemePalette | None = None, diagnostics: list[Diagnostic] | None = None
) -> ResolvedColor:
    """Concrete RGBA for a literal, scheme or system color.

    Transforms are applied in document order. Unknown scheme names degrade to
    opaque black with an ``UnknownScheme`` diagnostic.
    """
    palette = palette or ThemePalette.office()
    base: str | None
    if spec.kind == "srgb":
        base = spec.value
    elif spec.kind == "scheme":
        base = palette.lookup(spec.value)
        if base is None:
            report(diagnostics, "warning", "UnknownScheme", f"scheme color {spec.value!r} is not in the palette")
            return BLACK
    elif spec.kind == "system":
        base = spec.last_color or SYSTEM_COLORS.get(spec.value)
    else:
        raise ValueError(f"cannot resolve color of kind {spec.kind!r}")

    rgb = _hex_rgb(base or "")
    if rgb is None:
        report(diagnostics, "warning", "BadColorValue", f"color value {base!r} is not RRGGBB")
        return BLACK
    alpha = 255.0
    for op, amount in spec.transforms:
        rgb, alpha = apply_transform(rgb, alpha, op, amount)
    r, g, b = (int(round(c)) for c in rgb)
    return ResolvedColor(r, g, b, int(round(alpha)))


def effective_style_color(style_ref: ColorSpec | None, explicit: ColorSpec | None) -> ColorSpec:
    """Explicit properties win over the theme style reference; neither means no color."""
    if explicit is not None:
        return explicit
    if style_ref is not None:
        return style_ref
    return NO_COLOR
