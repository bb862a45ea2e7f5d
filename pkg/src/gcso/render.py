"""ASCII and SVG drawings of ladder diagrams, faces and block fillings.

Both renderers are deterministic: the same face always produces the same
bytes.  ASCII output uses box-drawing characters; light lines are diagram
edges, heavy lines are isogram edges and double lines are the coastline's
horizontal segments.  Cells covered by an L- or I-block carry its letter.
"""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

from .fibers import li_fill
from .ladder import DiagramFace, Edge, LadderDiagram

CELL_W = 4  # ASCII columns per unit
CELL_H = 2  # ASCII rows per unit
SVG_UNIT = 40
SVG_MARGIN = 20

_STYLE_CHARS = {
    "grid": ("─", "│"),
    "isogram": ("━", "┃"),
    "coast": ("═", "┃"),
}


def _extent(diagram: LadderDiagram) -> tuple[int, int]:
    xs = [v[0] for v in diagram.vertices] or [0]
    ys = [v[1] for v in diagram.vertices] or [0]
    return max(xs), max(ys)


def _edge_styles(diagram: LadderDiagram, face: DiagramFace | None) -> dict[Edge, str]:
    styles = {e: "grid" for e in diagram.edges}
    if face is None:
        return styles
    coast = face.coastline.segment_mask
    for e in face.isogram.edges:
        styles[e] = "coast" if coast & diagram.bit(e) else "isogram"
    return styles


def _cell_letters(face: DiagramFace | None) -> dict:
    if face is None:
        return {}
    return {box: kind for box, (kind, _) in li_fill(face).cells.items()}


def render_ascii(diagram: LadderDiagram, face: DiagramFace | None = None) -> str:
    width, height = _extent(diagram)
    rows = height * CELL_H + 1
    cols = width * CELL_W + 1
    canvas = [[" "] * cols for _ in range(rows)]

    def at(x: int, y: int) -> tuple[int, int]:
        return (height - y) * CELL_H, x * CELL_W

    for (i, j), letter in sorted(_cell_letters(face).items()):
        r, c = at(i - 1, j - 1)
        canvas[r - CELL_H // 2][c + CELL_W // 2] = letter

    for (p, q), style in sorted(_edge_styles(diagram, face).items()):
        horiz, vert = _STYLE_CHARS[style]
        r0, c0 = at(*p)
        r1, c1 = at(*q)
        if r0 == r1:
            for c in range(min(c0, c1) + 1, max(c0, c1)):
                canvas[r0][c] = horiz
        else:
            for r in range(min(r0, r1) + 1, max(r0, r1)):
                canvas[r][c0] = vert

    for v in sorted(diagram.vertices):
        r, c = at(*v)
        canvas[r][c] = "+"
    r, c = at(0, 0)
    canvas[r][c] = "o"
    return "\n".join("".join(row).rstrip() for row in canvas) + "\n"


_SVG_STROKES = {
    "grid": ("#b0b0b0", 1),
    "isogram": ("#000000", 3),
    "coast": ("#1f5fbf", 4),
}
_SVG_FILLS = {"L": "#f6c28b", "I": "#9cc7ef"}


def render_svg(diagram: LadderDiagram, face: DiagramFace | None = None, title: str | None = None) -> str:
    width, height = _extent(diagram)
    w = width * SVG_UNIT + 2 * SVG_MARGIN
    h = height * SVG_UNIT + 2 * SVG_MARGIN

    def at(x: float, y: float) -> tuple[int, int]:
        return SVG_MARGIN + round(x * SVG_UNIT), SVG_MARGIN + round((height - y) * SVG_UNIT)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
    ]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    out.append(f'<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>')
    for (i, j), letter in sorted(_cell_letters(face).items()):
        x, y = at(i - 1, j)
        out.append(
            f'<rect x="{x}" y="{y}" width="{SVG_UNIT}" height="{SVG_UNIT}" fill="{_SVG_FILLS[letter]}" class="{letter}-block"/>'
        )
    styles = _edge_styles(diagram, face)
    for layer in ("grid", "isogram", "coast"):
        color, stroke = _SVG_STROKES[layer]
        for (p, q), style in sorted(styles.items()):
            if style != layer:
                continue
            x0, y0 = at(*p)
            x1, y1 = at(*q)
            out.append(
                f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" stroke="{color}" stroke-width="{stroke}" stroke-linecap="round"/>'
            )
    ox, oy = at(0, 0)
    out.append(f'<circle cx="{ox}" cy="{oy}" r="4" fill="#7a2ea0" class="origin"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_many_svg(diagram: LadderDiagram, faces: Sequence[DiagramFace]) -> str:
    """Several faces side by side in one SVG document."""
    if not faces:
        return render_svg(diagram)
    width, height = _extent(diagram)
    panel_w = width * SVG_UNIT + 2 * SVG_MARGIN
    panel_h = height * SVG_UNIT + 2 * SVG_MARGIN
    total_w = panel_w * len(faces)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{panel_h}" viewBox="0 0 {total_w} {panel_h}">'
    ]
    for k, face in enumerate(faces):
        inner = render_svg(diagram, face, title=f"face {face.id} (dim {face.dim})").splitlines()[1:-1]
        out.append(f'<g transform="translate({k * panel_w},0)" id="face-{face.id}">')
        out.extend("  " + line for line in inner)
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
