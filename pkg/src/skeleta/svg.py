"""Deterministic SVG rendering of planar instances.

Output is a pure function of the input data: fixed viewport arithmetic,
sorted element order, no timestamps, so identical input gives identical
bytes.  Orientation arrows are drawn when Morse data is supplied.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Optional

from .morse import MorseData
from .polynomial import Vector
from .skeleton import Skeleton, SkeletonError

_SIZE = 420
_MARGIN = 40


def emit_svg(skeleton: Skeleton, positions: Mapping[str, Vector],
             morse: Optional[MorseData] = None) -> str:
    if skeleton.dimension != 2 and not positions:
        raise SkeletonError("drawing requires plane positions")
    missing = [v for v in skeleton.vertices if v not in positions]
    if missing:
        raise SkeletonError(f"missing drawing positions for {missing}")
    xs = [positions[v][0] for v in skeleton.vertices]
    ys = [positions[v][1] for v in skeleton.vertices]
    lo_x, hi_x = min(xs), max(xs)
    lo_y, hi_y = min(ys), max(ys)
    span = max(hi_x - lo_x, hi_y - lo_y, Fraction(1))
    scale = Fraction(_SIZE - 2 * _MARGIN) / span

    def place(v: str) -> tuple[str, str]:
        p = positions[v]
        x = _MARGIN + (p[0] - lo_x) * scale
        y = _SIZE - _MARGIN - (p[1] - lo_y) * scale
        return _fmt(x), _fmt(y)

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SIZE}" height="{_SIZE}" '
        f'viewBox="0 0 {_SIZE} {_SIZE}">',
        '<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" '
        'markerWidth="6" markerHeight="6" orient="auto-start-reverse">'
        '<path d="M 0 0 L 10 5 L 0 10 z" fill="#444"/></marker></defs>',
    ]
    for (p, q) in skeleton.unoriented_edges():
        a, b = p, q
        marker = ""
        if morse is not None:
            if not morse.oriented((p, q)):
                a, b = q, p
            marker = ' marker-end="url(#arrow)"'
        x1, y1 = place(a)
        x2, y2 = place(b)
        lines.append(
            f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
            f'stroke="#444" stroke-width="1.5"{marker}/>')
    for v in skeleton.vertices:
        x, y = place(v)
        lines.append(f'<circle cx="{x}" cy="{y}" r="5" fill="#1f4e79"/>')
        lines.append(
            f'<text x="{x}" y="{y}" dx="8" dy="-6" font-size="13" '
            f'font-family="monospace" fill="#111">{v}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _fmt(value: Fraction) -> str:
    # fixed two-decimal rendering keeps the output exact and stable
    scaled = round(value * 100)
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    return f"{sign}{scaled // 100}.{scaled % 100:02d}"
