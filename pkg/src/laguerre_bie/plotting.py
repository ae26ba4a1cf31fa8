"""Static SVG overlay of boundary curves (no plotting dependency)."""

from pathlib import Path
from xml.sax.saxutils import escape

from .geometry import ParametricCurve, sample_curve

VIEWPORT = (-1.6, 1.6)
SIZE_PX = 480

# (stroke, dash pattern, width) per role
STYLES = {
    "exterior": ("#000000", None, 2.0),
    "true": ("#000000", "8,5", 1.5),
    "initial": ("#555555", "2,4", 1.5),
    "reconstruction": ("#c00000", None, 2.0),
}


def _to_px(points):
    lo, hi = VIEWPORT
    scale = SIZE_PX / (hi - lo)
    x = (points[:, 0] - lo) * scale
    y = (hi - points[:, 1]) * scale  # SVG y axis points down
    return x, y


def _path(curve: ParametricCurve, role: str, n: int) -> str:
    _, pts = sample_curve(curve, n)
    x, y = _to_px(pts)
    d = "M " + " L ".join(f"{a:.3f},{b:.3f}" for a, b in zip(x, y)) + " Z"
    stroke, dash, width = STYLES[role]
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    return (f'  <path class="{role}" d="{d}" fill="none" stroke="{stroke}" '
            f'stroke-width="{width}"{dash_attr}/>')


def overlay_svg(exterior: ParametricCurve, reconstruction: ParametricCurve | None = None,
                true_inner: ParametricCurve | None = None, initial: ParametricCurve | None = None,
                title: str = "", n: int = 400) -> str:
    """SVG text: exterior solid, true cavity dashed, initial guess dotted, reconstruction solid red."""
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE_PX}" height="{SIZE_PX}" '
        f'viewBox="0 0 {SIZE_PX} {SIZE_PX}">',
        f'  <rect width="{SIZE_PX}" height="{SIZE_PX}" fill="#ffffff"/>',
    ]
    if title:
        parts.append(f'  <text x="10" y="20" font-family="sans-serif" font-size="14">{escape(title)}</text>')
    for role, curve in (("exterior", exterior), ("true", true_inner),
                        ("initial", initial), ("reconstruction", reconstruction)):
        if curve is not None:
            parts.append(_path(curve, role, n))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_overlay_svg(path, exterior, reconstruction=None, true_inner=None, initial=None,
                      title: str = "") -> Path:
    path = Path(path)
    path.write_text(overlay_svg(exterior, reconstruction, true_inner, initial, title))
    return path
