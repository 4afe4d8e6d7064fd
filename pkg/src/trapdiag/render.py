"""SVG, TikZ and JSON output for laid-out diagrams.

Every emitter is a pure function of its inputs. Numbers are printed in fixed
notation (6 decimals for SVG and TikZ, 9 for JSON) after rounding, with
negative zero folded into zero, so output is byte-stable across platforms.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional
from xml.sax.saxutils import escape

import numpy as np

from .layout import Diagram, Region, SeqSplit, TenSplit

MARGIN = 0.5  # diagram units of blank space around the outline


@dataclass(frozen=True)
class RenderStyle:
    scale: float = 60.0  # pixels per diagram unit
    stroke_width: float = 2.0
    show_outline: bool = False
    font_size: float = 14.0

    def __post_init__(self) -> None:
        for name in ("scale", "stroke_width", "font_size"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive number, got {v!r}")


def _rounded(a, digits: int) -> np.ndarray:
    # + 0.0 turns the -0.0 produced by rounding tiny negatives into 0.0
    return np.round(np.asarray(a, dtype=float), digits) + 0.0


def _fmt_many(template: str, values: np.ndarray, digits: int) -> list[str]:
    """Format ``values`` row by row with ``template``, one string per row."""
    values = _rounded(values, digits)
    if values.size == 0:
        return []
    rows = values.reshape(len(values), -1)
    text = (template + "\n") * len(rows) % tuple(rows.ravel().tolist())
    return text.split("\n")[:-1]


def _num(v: float, digits: int = 6) -> str:
    return f"{float(_rounded(v, digits)):.{digits}f}"


@dataclass(frozen=True)
class PixelMap:
    """Diagram units (y up) to SVG pixels (y down)."""

    scale: float
    height: float  # diagram units between the bottom and top margins

    def to_px(self, xy) -> np.ndarray:
        xy = np.asarray(xy, dtype=float)
        out = np.empty_like(xy)
        out[..., 0] = (xy[..., 0] + MARGIN) * self.scale
        out[..., 1] = (self.height - MARGIN - xy[..., 1]) * self.scale
        return out

    def from_px(self, px) -> np.ndarray:
        px = np.asarray(px, dtype=float)
        out = np.empty_like(px)
        out[..., 0] = px[..., 0] / self.scale - MARGIN
        out[..., 1] = self.height - MARGIN - px[..., 1] / self.scale
        return out


def pixel_map(d: Diagram, style: RenderStyle) -> PixelMap:
    o = d.outline
    return PixelMap(float(style.scale), float(max(o.l, o.r)) + 2 * MARGIN)


def _wire_paths(d: Diagram, to_px) -> list[str]:
    """One ``M ... C ...`` path string per wire, in wire order."""
    order, slices = d.wire_slices()
    if not slices:
        return []
    ctrl = to_px(d.ctrl[order])
    curves = _fmt_many("C %.6f %.6f %.6f %.6f %.6f %.6f", ctrl[:, 1:], 6)
    firsts = [sl.start for sl in slices]
    moves = _fmt_many("M %.6f %.6f", ctrl[firsts, 0], 6)
    return [m + " " + " ".join(curves[sl]) for m, sl in zip(moves, slices)]


def to_svg(d: Diagram, style: Optional[RenderStyle] = None) -> bytes:
    style = style or RenderStyle()
    pm = pixel_map(d, style)
    o = d.outline
    width = (o.w + 2 * MARGIN) * pm.scale
    height = pm.height * pm.scale
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_num(width)}" '
        f'height="{_num(height)}" viewBox="0 0 {_num(width)} {_num(height)}">',
    ]
    if style.show_outline:
        poly = " ".join(_fmt_many("%.6f,%.6f", pm.to_px(d.polygon()), 6))
        out.append(f'<polygon class="outline" points="{poly}" fill="none" stroke="#999999" stroke-width="1"/>')
        out.append('<g class="seams" fill="none" stroke="#cc3333" stroke-width="1" stroke-dasharray="4 3">')
        for edge in d.seams[:, 0]:
            out.append(f'<polyline points="{" ".join(_fmt_many("%.6f,%.6f", pm.to_px(edge), 6))}"/>')
        out.append("</g>")

    out.append(f'<g class="wires" fill="none" stroke="black" stroke-width="{_num(style.stroke_width)}">')
    out.extend(f'<path d="{p}"/>' for p in _wire_paths(d, pm.to_px))
    out.append("</g>")

    if d.n_nodes:
        ext = d.half_extents
        corners = pm.to_px(d.anchors + ext * (-1.0, 1.0))
        boxes = np.concatenate([corners, 2 * ext * pm.scale], axis=1)
        rects = _fmt_many('<rect x="%.6f" y="%.6f" width="%.6f" height="%.6f"/>', boxes, 6)
        centres = _fmt_many('x="%.6f" y="%.6f"', pm.to_px(d.anchors), 6)
        out.append(f'<g class="nodes" fill="white" stroke="black" stroke-width="{_num(style.stroke_width)}">')
        out.extend(rects)
        out.append("</g>")
        out.append(
            f'<g class="labels" font-family="sans-serif" font-size="{_num(style.font_size)}" '
            'text-anchor="middle" dominant-baseline="central">'
        )
        out.extend(f"<text {c}>{escape(label)}</text>" for c, label in zip(centres, d.labels))
        out.append("</g>")
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


# -- TikZ ---------------------------------------------------------------------

_TEX_SPECIAL = {c: "\\" + c for c in "#$%&_{}"}
_TEX_SPECIAL.update({"\\": r"\textbackslash{}", "^": r"\^{}", "~": r"\~{}"})


def _tex(label: str) -> str:
    return "".join(_TEX_SPECIAL.get(c, c) for c in label)


def to_tikz(d: Diagram, style: Optional[RenderStyle] = None, standalone: bool = False) -> str:
    """A ``tikzpicture`` in diagram units; ``scale`` pixels become one centimetre per 60.

    With ``standalone`` the picture is wrapped in a compilable document.
    """
    style = style or RenderStyle()
    unit = _num(style.scale / 60.0)
    # 1 pt = 1/72.27 in; pixels are taken as 1/96 in
    pt = 72.27 / 96.0
    lines = [
        f"\\begin{{tikzpicture}}[x={unit}cm, y={unit}cm, "
        f"line width={_num(style.stroke_width * pt)}pt, font=\\fontsize{{{_num(style.font_size * pt)}}}"
        f"{{{_num(style.font_size * pt * 1.2)}}}\\selectfont]"
    ]
    if style.show_outline:
        poly = " -- ".join(_fmt_many("(%.6f,%.6f)", d.polygon(), 6))
        lines.append(f"  \\draw[gray, thin] {poly} -- cycle;")
        for edge in d.seams[:, 0]:
            lines.append(f"  \\draw[red, thin, dashed] {' -- '.join(_fmt_many('(%.6f,%.6f)', edge, 6))};")
    order, slices = d.wire_slices()
    if slices:
        ctrl = d.ctrl[order]
        curves = _fmt_many(".. controls (%.6f,%.6f) and (%.6f,%.6f) .. (%.6f,%.6f)", ctrl[:, 1:], 6)
        moves = _fmt_many("(%.6f,%.6f)", ctrl[[sl.start for sl in slices], 0], 6)
        lines.extend(f"  \\draw {m} {' '.join(curves[sl])};" for m, sl in zip(moves, slices))
    if d.n_nodes:
        sizes = _fmt_many("minimum width=%.6fcm, minimum height=%.6fcm", 2 * d.half_extents * (style.scale / 60.0), 6)
        at = _fmt_many("(%.6f,%.6f)", d.anchors, 6)
        for size, pos, label in zip(sizes, at, d.labels):
            lines.append(f"  \\node[draw, fill=white, inner sep=0pt, {size}] at {pos} {{{_tex(label)}}};")
    lines.append("\\end{tikzpicture}")
    body = "\n".join(lines) + "\n"
    if standalone:
        body = "\\documentclass[tikz]{standalone}\n\\begin{document}\n" + body + "\\end{document}\n"
    return body


# -- JSON ---------------------------------------------------------------------


def _jnum(v: float) -> str:
    return _num(v, 9)


def _jstr(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def _jarity(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else _jnum(v)


def _bsp_json(node) -> str:
    """The BSP tree as nested JSON objects, written iteratively."""
    # each stack item is either a node to expand or a literal string to emit
    parts: list[str] = []
    stack: list = [node]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            parts.append(item)
        elif isinstance(item, Region):
            label = "null" if item.label is None else _jstr(item.label)
            parts.append(
                f'{{"type":"region","kind":{_jstr(item.kind)},"label":{label},'
                f'"segments":{item.n_segments}}}'
            )
        elif isinstance(item, SeqSplit):
            head = f'{{"type":"seq","seam_x":{_jnum(item.seam_x)},'
            if item.n_connectors:
                head += f'"connectors":{item.n_connectors},'
            stack.extend(["}", item.right, ',"right":', item.left, head + '"left":'])
        elif isinstance(item, TenSplit):
            head = f'{{"type":"ten","seam":[{_jnum(item.seam[0])},{_jnum(item.seam[1])}],"top":'
            stack.extend(["}", item.bottom, ',"bottom":', item.top, head])
        else:  # pragma: no cover - the tree only holds the three node kinds
            raise TypeError(f"unexpected BSP node {item!r}")
    return "".join(parts)


def to_json(d: Diagram) -> bytes:
    """Layout dump with keys in the order outline, nodes, wires, bsp."""
    o = d.outline
    out = [
        f'{{"outline":{{"l":{_jarity(o.l)},"r":{_jarity(o.r)},"w":{_jnum(o.w)}}},',
        '"nodes":[',
    ]
    anchors = _fmt_many("[%.9f,%.9f]", d.anchors, 9)
    out.append(",".join(f'{{"label":{_jstr(label)},"anchor":{a}}}' for label, a in zip(d.labels, anchors)))
    out.append('],"wires":[')
    order, slices = d.wire_slices()
    segs = _fmt_many("[[%.9f,%.9f],[%.9f,%.9f],[%.9f,%.9f],[%.9f,%.9f]]", d.ctrl[order], 9)
    wires = []
    for (start, end), sl in zip(d.wire_roles(), slices):
        wires.append(f'{{"role":[{_jstr(start)},{_jstr(end)}],"beziers":[{",".join(segs[sl])}]}}')
    out.append(",".join(wires))
    out.append('],"bsp":')
    out.append(_bsp_json(d.tree))
    out.append("}\n")
    return "".join(out).encode("utf-8")
