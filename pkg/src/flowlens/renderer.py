"""Scene assembly and deterministic SVG output.

Render operators in the runtime call ``render_mark_items`` and
``render_axis_items`` so the cost of building scene items is timed like
any other operator. ``assemble_scene`` then stitches the cached Render
outputs into a SceneGraph, and ``scene_to_svg`` serializes it with fixed
attribute order and fixed 3-decimal geometry so output is byte-identical
across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
from xml.sax.saxutils import escape, quoteattr

from .errors import EvalError

MARK_FILL = "#4c78a8"
TEXT_FILL = "#000000"
AXIS_COLOR = "#333333"
DEFAULT_SYMBOL_SIZE = 64
TICK_LENGTH = 5
LABEL_OFFSET = 7
MARK_FONT_SIZE = 11
AXIS_FONT_SIZE = 10


@dataclass(frozen=True)
class SceneItem:
    """One drawable element: a circle, rect, polyline, or text run."""

    mark: str  # symbol | rect | line | text
    x: Optional[float] = None
    y: Optional[float] = None
    width: Optional[float] = None
    height: Optional[float] = None
    size: Optional[float] = None
    text: Optional[str] = None
    points: Optional[Tuple[Tuple[float, float], ...]] = None
    fill: Optional[str] = None
    stroke: Optional[str] = None
    opacity: Optional[float] = None
    anchor: Optional[str] = None
    font_size: Optional[int] = None
    row: Optional[int] = None


@dataclass(frozen=True)
class SceneLayer:
    kind: str  # axis | mark
    label: str
    origin: Tuple
    items: Tuple[SceneItem, ...]


@dataclass(frozen=True)
class SceneGraph:
    width: int
    height: int
    layers: Tuple[SceneLayer, ...]


def _geom(value, channel: str, row: int) -> float:
    """Coerce a channel value to finite geometry; null reads as 0."""
    if value is None:
        return 0.0
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise EvalError(f"channel {channel!r} needs a number, got {value!r} (row {row})")
    v = float(value)
    if not math.isfinite(v):
        raise EvalError(f"channel {channel!r} is not finite (row {row})")
    return v


def _span(item: dict, lo: str, hi: str, extent: str, row: int) -> Tuple[float, float]:
    """Resolve x/x2/width (or y/y2/height) into a start and a length."""
    start = _geom(item.get(lo), lo, row)
    if hi in item:
        end = _geom(item[hi], hi, row)
        return min(start, end), abs(end - start)
    if extent in item:
        return start, _geom(item[extent], extent, row)
    return start, 0.0


def _opacity(item: dict, row: int) -> Optional[float]:
    if "opacity" not in item:
        return None
    return _geom(item["opacity"], "opacity", row)


def render_mark_items(mark_type: str, encoded: List[dict]) -> List[SceneItem]:
    """Turn Encode output rows into scene items (one per row; one
    polyline total for line marks)."""
    items: List[SceneItem] = []
    if mark_type == "line":
        points = []
        for it in encoded:
            row = it["row"]
            points.append((_geom(it.get("x"), "x", row), _geom(it.get("y"), "y", row)))
        stroke = None
        opacity = None
        if encoded:
            stroke = encoded[0].get("stroke")
            opacity = _opacity(encoded[0], encoded[0]["row"])
        if points:
            items.append(SceneItem(mark="line", points=tuple(points),
                                   stroke=stroke or MARK_FILL, opacity=opacity))
        return items
    for it in encoded:
        row = it["row"]
        if mark_type == "symbol":
            size = _geom(it.get("size", DEFAULT_SYMBOL_SIZE), "size", row)
            items.append(SceneItem(
                mark="symbol",
                x=_geom(it.get("x"), "x", row),
                y=_geom(it.get("y"), "y", row),
                size=size,
                fill=it.get("fill") or MARK_FILL,
                opacity=_opacity(it, row),
                row=row))
        elif mark_type == "rect":
            x, w = _span(it, "x", "x2", "width", row)
            y, h = _span(it, "y", "y2", "height", row)
            items.append(SceneItem(
                mark="rect", x=x, y=y, width=w, height=h,
                fill=it.get("fill") or MARK_FILL,
                opacity=_opacity(it, row),
                row=row))
        elif mark_type == "text":
            value = it.get("text")
            items.append(SceneItem(
                mark="text",
                x=_geom(it.get("x"), "x", row),
                y=_geom(it.get("y"), "y", row),
                text="" if value is None else str(value),
                fill=it.get("fill") or TEXT_FILL,
                opacity=_opacity(it, row),
                font_size=MARK_FONT_SIZE,
                row=row))
        else:
            raise EvalError(f"cannot render mark type {mark_type!r}")
    return items


def render_axis_items(payload: dict, orient: str, width: int, height: int) -> List[SceneItem]:
    """Axis = one domain line, one tick line and one label per tick."""
    r0, r1 = payload["range"]
    lo, hi = min(r0, r1), max(r0, r1)
    ticks = payload["ticks"]
    items: List[SceneItem] = []
    horizontal = orient in ("bottom", "top")
    if horizontal:
        base = float(height) if orient == "bottom" else 0.0
        sign = 1.0 if orient == "bottom" else -1.0
        items.append(SceneItem(mark="line", points=((lo, base), (hi, base)),
                               stroke=AXIS_COLOR))
        for t in ticks:
            pos = float(t["position"])
            items.append(SceneItem(mark="line",
                                   points=((pos, base), (pos, base + sign * TICK_LENGTH)),
                                   stroke=AXIS_COLOR))
            items.append(SceneItem(mark="text", x=pos,
                                   y=base + sign * (LABEL_OFFSET + AXIS_FONT_SIZE - 1)
                                   + (0.0 if orient == "bottom" else AXIS_FONT_SIZE * 0.6),
                                   text=t["label"], fill=AXIS_COLOR, anchor="middle",
                                   font_size=AXIS_FONT_SIZE))
    else:
        base = 0.0 if orient == "left" else float(width)
        sign = -1.0 if orient == "left" else 1.0
        anchor = "end" if orient == "left" else "start"
        items.append(SceneItem(mark="line", points=((base, lo), (base, hi)),
                               stroke=AXIS_COLOR))
        for t in ticks:
            pos = float(t["position"])
            items.append(SceneItem(mark="line",
                                   points=((base, pos), (base + sign * TICK_LENGTH, pos)),
                                   stroke=AXIS_COLOR))
            items.append(SceneItem(mark="text", x=base + sign * LABEL_OFFSET,
                                   y=pos + AXIS_FONT_SIZE * 0.3,
                                   text=t["label"], fill=AXIS_COLOR, anchor=anchor,
                                   font_size=AXIS_FONT_SIZE))
    return items


def assemble_scene(desc, cache: Dict[int, object]) -> SceneGraph:
    """Collect Render outputs into layers: axes first, then marks in
    definition order."""
    width = height = None
    axis_layers: List[SceneLayer] = []
    mark_layers: List[SceneLayer] = []
    for node in desc.nodes:
        if node.kind != "Render":
            continue
        width = node.params["width"]
        height = node.params["height"]
        items = tuple(cache.get(node.id) or ())
        origin = tuple(node.origin)
        label = _path_label(origin)
        if node.params["target"] == "axis":
            axis_layers.append(SceneLayer("axis", label, origin, items))
        else:
            mark_layers.append(SceneLayer("mark", label, origin, items))
    if width is None:
        raise EvalError("no Render nodes in dataflow")
    return SceneGraph(width=width, height=height,
                      layers=tuple(axis_layers + mark_layers))


def _path_label(path: Tuple) -> str:
    out = []
    for part in path:
        if isinstance(part, int):
            out.append(f"[{part}]")
        else:
            out.append(f".{part}" if out else str(part))
    return "".join(out)


def _fmt(v: float) -> str:
    return f"{float(v):.3f}"


def _attrs(pairs) -> str:
    return "".join(f" {k}={quoteattr(v)}" for k, v in pairs if v is not None)


def _item_svg(item: SceneItem) -> str:
    if item.mark == "symbol":
        r = math.sqrt((item.size or 0.0) / math.pi)
        pairs = [("cx", _fmt(item.x)), ("cy", _fmt(item.y)), ("r", _fmt(r)),
                 ("fill", item.fill),
                 ("opacity", _fmt(item.opacity) if item.opacity is not None else None)]
        return f"<circle{_attrs(pairs)}/>"
    if item.mark == "rect":
        pairs = [("x", _fmt(item.x)), ("y", _fmt(item.y)),
                 ("width", _fmt(item.width)), ("height", _fmt(item.height)),
                 ("fill", item.fill),
                 ("opacity", _fmt(item.opacity) if item.opacity is not None else None)]
        return f"<rect{_attrs(pairs)}/>"
    if item.mark == "line":
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in item.points or ())
        pairs = [("points", pts), ("fill", "none"), ("stroke", item.stroke),
                 ("stroke-width", "1"),
                 ("opacity", _fmt(item.opacity) if item.opacity is not None else None)]
        return f"<polyline{_attrs(pairs)}/>"
    if item.mark == "text":
        pairs = [("x", _fmt(item.x)), ("y", _fmt(item.y)),
                 ("text-anchor", item.anchor),
                 ("font-family", "sans-serif"),
                 ("font-size", str(item.font_size or MARK_FONT_SIZE)),
                 ("fill", item.fill),
                 ("opacity", _fmt(item.opacity) if item.opacity is not None else None)]
        return f"<text{_attrs(pairs)}>{escape(item.text or '')}</text>"
    raise EvalError(f"cannot serialize scene item {item.mark!r}")


def scene_to_svg(scene: SceneGraph) -> str:
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{scene.width}"'
        f' height="{scene.height}" viewBox="0 0 {scene.width} {scene.height}">',
        f'<rect width="{scene.width}" height="{scene.height}" fill="#ffffff"/>',
    ]
    for layer in scene.layers:
        lines.append(f"<g data-origin={quoteattr(layer.label)}>")
        for item in layer.items:
            lines.append(_item_svg(item))
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
