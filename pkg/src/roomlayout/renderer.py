"""Deterministic 2D floorplan rendering to SVG.

Output uses a small SVG 1.1 subset (rect, polygon, line, text, g).  Content is
organized into groups with stable ids so downstream tooling can toggle layers:

    layer-room       room outline, doors with swing arcs, windows, sockets
    layer-zones      Voronoi cell shading and zone markers
    layer-primary    primary object footprints
    layer-secondary  secondary object footprints
    layer-tertiary   tertiary object footprints
    layer-pathway    walking-corridor sample points
    layer-labels     object and zone names
    metrics          summary text (only when a metrics report is passed)

Every object footprint carries a front-direction tick from its center to the
midpoint of its front edge.  Identical inputs produce byte-identical output:
attributes are emitted in sorted order and numbers use a fixed format.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .geometry import Point2, facing_vector, obb_corners
from .metrics import MetricsReport, pathway_points
from .scene import LayoutGraph, Placement, Room, door_swing_polygon

ALL_LAYERS = frozenset({"zones", "primary", "secondary", "tertiary", "pathway", "labels"})

PALETTES = {
    "default": {
        "room": "#222222",
        "door": "#8b5a2b",
        "window": "#4a90d9",
        "socket": "#c0392b",
        "zone_fill": ("#f4e7d3", "#dce9f4", "#e3f0dd", "#f0dde9", "#e9e3f0"),
        "primary": "#b0413e",
        "secondary": "#2e6f95",
        "tertiary": "#6a8d39",
        "pathway": "#999999",
        "label": "#111111",
    },
    "mono": {
        "room": "#000000",
        "door": "#555555",
        "window": "#777777",
        "socket": "#333333",
        "zone_fill": ("#f2f2f2", "#e6e6e6", "#dadada", "#cecece", "#c2c2c2"),
        "primary": "#111111",
        "secondary": "#444444",
        "tertiary": "#777777",
        "pathway": "#aaaaaa",
        "label": "#000000",
    },
}

MARGIN_PX = 20.0


class MissingPlacementError(ValueError):
    """Raised when a requested layer needs objects that have no placement."""

    def __init__(self, names: Sequence[str]):
        self.names = tuple(names)
        super().__init__("missing placements for: " + ", ".join(self.names))


@dataclass(frozen=True)
class RenderOptions:
    scale: float = 100.0  # pixels per meter
    layers: frozenset[str] = ALL_LAYERS
    palette: str = "default"

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        unknown = set(self.layers) - ALL_LAYERS
        if unknown:
            raise ValueError(f"unknown layers: {sorted(unknown)}")
        if self.palette not in PALETTES:
            raise ValueError(f"unknown palette {self.palette!r}")


@dataclass(frozen=True)
class Transform:
    """Affine model-to-screen map; SVG y runs downward."""

    scale: float
    length: float
    margin: float = MARGIN_PX

    def to_screen(self, x: float, y: float) -> tuple[float, float]:
        return (self.margin + self.scale * x, self.margin + self.scale * (self.length - y))

    def to_model(self, px: float, py: float) -> tuple[float, float]:
        return ((px - self.margin) / self.scale, self.length - (py - self.margin) / self.scale)


def _fmt(v: float) -> str:
    s = f"{v:.5f}"
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    if s in ("-0", ""):
        s = "0"
    return s


def _open(tag: str, attrs: Mapping[str, str]) -> str:
    return f"<{tag}" + "".join(f' {k}="{attrs[k]}"' for k in sorted(attrs)) + ">"


def _el(tag: str, attrs: Mapping[str, str], text: Optional[str] = None) -> str:
    parts = [f"<{tag}"]
    for k in sorted(attrs):
        parts.append(f' {k}="{attrs[k]}"')
    if text is None:
        parts.append("/>")
    else:
        parts.append(f">{text}</{tag}>")
    return "".join(parts)


def _points_attr(tf: Transform, pts: Sequence[tuple[float, float]]) -> str:
    return " ".join(
        f"{_fmt(px)},{_fmt(py)}" for px, py in (tf.to_screen(x, y) for x, y in pts)
    )


def _halfplane_clip(
    vertices: list[tuple[float, float]], a: float, b: float, c: float
) -> list[tuple[float, float]]:
    """Keep the part of a convex polygon with a*x + b*y <= c."""
    out: list[tuple[float, float]] = []
    n = len(vertices)
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        d0 = a * x0 + b * y0 - c
        d1 = a * x1 + b * y1 - c
        if d0 <= 1e-12:
            out.append((x0, y0))
        if (d0 < -1e-12 and d1 > 1e-12) or (d0 > 1e-12 and d1 < -1e-12):
            t = d0 / (d0 - d1)
            out.append((x0 + t * (x1 - x0), y0 + t * (y1 - y0)))
    return out


def zone_cells(room: Room, centroids: Sequence[Point2]) -> list[list[tuple[float, float]]]:
    """Voronoi cell polygon of each centroid, clipped to the room rectangle."""
    cells = []
    for k, ck in enumerate(centroids):
        poly = [(0.0, 0.0), (room.width, 0.0), (room.width, room.length), (0.0, room.length)]
        for j, cj in enumerate(centroids):
            if j == k or not poly:
                continue
            # closer to ck than cj: 2(cj-ck).p <= |cj|^2 - |ck|^2
            a = 2.0 * (cj.x - ck.x)
            b = 2.0 * (cj.y - ck.y)
            c = cj.x**2 + cj.y**2 - ck.x**2 - ck.y**2
            poly = _halfplane_clip(poly, a, b, c)
        cells.append(poly)
    return cells


def _room_group(graph: LayoutGraph, tf: Transform, pal: dict) -> list[str]:
    room = graph.room
    parts = ['<g id="layer-room">']
    x0, y0 = tf.to_screen(0.0, room.length)
    parts.append(
        _el(
            "rect",
            {
                "fill": "none",
                "height": _fmt(tf.scale * room.length),
                "stroke": pal["room"],
                "stroke-width": "2",
                "width": _fmt(tf.scale * room.width),
                "x": _fmt(x0),
                "y": _fmt(y0),
            },
        )
    )
    for door in room.doors:
        swing = door_swing_polygon(room, door)
        parts.append(
            _el(
                "polygon",
                {
                    "fill": "none",
                    "points": _points_attr(tf, swing.vertices),
                    "stroke": pal["door"],
                    "stroke-dasharray": "4 3",
                    "stroke-width": "1",
                },
            )
        )
        a = room.wall_point(door.wall, door.offset - door.width / 2)
        b = room.wall_point(door.wall, door.offset + door.width / 2)
        (ax, ay), (bx, by) = tf.to_screen(a.x, a.y), tf.to_screen(b.x, b.y)
        parts.append(
            _el(
                "line",
                {
                    "stroke": pal["door"],
                    "stroke-width": "4",
                    "x1": _fmt(ax),
                    "x2": _fmt(bx),
                    "y1": _fmt(ay),
                    "y2": _fmt(by),
                },
            )
        )
    for window in room.windows:
        a = room.wall_point(window.wall, window.offset - window.width / 2)
        b = room.wall_point(window.wall, window.offset + window.width / 2)
        (ax, ay), (bx, by) = tf.to_screen(a.x, a.y), tf.to_screen(b.x, b.y)
        parts.append(
            _el(
                "line",
                {
                    "stroke": pal["window"],
                    "stroke-width": "5",
                    "x1": _fmt(ax),
                    "x2": _fmt(bx),
                    "y1": _fmt(ay),
                    "y2": _fmt(by),
                },
            )
        )
    for socket in room.sockets:
        p = room.wall_point(socket.wall, socket.offset)
        px, py = tf.to_screen(p.x, p.y)
        parts.append(
            _el(
                "rect",
                {
                    "fill": pal["socket"],
                    "height": "6",
                    "width": "6",
                    "x": _fmt(px - 3),
                    "y": _fmt(py - 3),
                },
            )
        )
    parts.append("</g>")
    return parts


def _tier_group(
    graph: LayoutGraph,
    placements: Mapping[int, Placement],
    tier: str,
    tf: Transform,
    pal: dict,
) -> list[str]:
    parts = [f'<g id="layer-{tier}">']
    for i in graph.tier_indices(tier):
        spec = graph.objects[i]
        box = placements[i].box(spec)
        pts = [(c.x, c.y) for c in obb_corners(box)]
        parts.append(
            _el(
                "polygon",
                {
                    "fill": pal[tier],
                    "fill-opacity": "0.35",
                    "points": _points_attr(tf, pts),
                    "stroke": pal[tier],
                    "stroke-width": "1.5",
                },
            )
        )
        # front-direction tick: center to front-edge midpoint
        fx, fy = facing_vector(box.theta)
        tip = (box.center.x + fx * box.length / 2, box.center.y + fy * box.length / 2)
        (cx, cy), (tx, ty) = tf.to_screen(box.center.x, box.center.y), tf.to_screen(*tip)
        parts.append(
            _el(
                "line",
                {
                    "stroke": pal[tier],
                    "stroke-width": "2",
                    "x1": _fmt(cx),
                    "x2": _fmt(tx),
                    "y1": _fmt(cy),
                    "y2": _fmt(ty),
                },
            )
        )
    parts.append("</g>")
    return parts


def render_svg(
    graph: LayoutGraph,
    placements: Mapping[int, Placement],
    metrics: Optional[MetricsReport] = None,
    options: RenderOptions = RenderOptions(),
) -> str:
    """Render the floorplan as an SVG document string.

    Raises MissingPlacementError when a requested object layer references
    objects without placements.  Identical inputs give identical bytes.
    """
    room = graph.room
    pal = PALETTES[options.palette]
    tf = Transform(options.scale, room.length)

    missing = [
        graph.objects[i].name
        for tier in ("primary", "secondary", "tertiary")
        if tier in options.layers
        for i in graph.tier_indices(tier)
        if i not in placements
    ]
    if missing:
        raise MissingPlacementError(missing)

    width_px = 2 * MARGIN_PX + options.scale * room.width
    height_px = 2 * MARGIN_PX + options.scale * room.length
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        _open(
            "svg",
            {
                "height": _fmt(height_px),
                "version": "1.1",
                "viewBox": f"0 0 {_fmt(width_px)} {_fmt(height_px)}",
                "width": _fmt(width_px),
                "xmlns": "http://www.w3.org/2000/svg",
            },
        ),
    ]

    if "zones" in options.layers and graph.zones:
        parts.append('<g id="layer-zones">')
        fills = pal["zone_fill"]
        for k, (zone, cell) in enumerate(
            zip(graph.zones, zone_cells(room, [z.centroid for z in graph.zones]))
        ):
            if not cell:
                continue
            parts.append(
                _el(
                    "polygon",
                    {
                        "fill": fills[k % len(fills)],
                        "fill-opacity": "0.6",
                        "points": _points_attr(tf, cell),
                        "stroke": "none",
                    },
                )
            )
        parts.append("</g>")

    parts.extend(_room_group(graph, tf, pal))

    for tier in ("primary", "secondary", "tertiary"):
        if tier in options.layers and graph.tier_indices(tier):
            parts.extend(_tier_group(graph, placements, tier, tf, pal))

    if "pathway" in options.layers:
        parts.append('<g id="layer-pathway">')
        for p in pathway_points(room):
            px, py = tf.to_screen(p.x, p.y)
            parts.append(
                _el(
                    "rect",
                    {
                        "fill": pal["pathway"],
                        "fill-opacity": "0.5",
                        "height": "2",
                        "width": "2",
                        "x": _fmt(px - 1),
                        "y": _fmt(py - 1),
                    },
                )
            )
        parts.append("</g>")

    if "labels" in options.layers:
        parts.append('<g id="layer-labels">')
        for zone in graph.zones:
            px, py = tf.to_screen(zone.centroid.x, zone.centroid.y)
            parts.append(
                _el(
                    "text",
                    {
                        "fill": pal["label"],
                        "font-family": "sans-serif",
                        "font-size": "11",
                        "font-style": "italic",
                        "text-anchor": "middle",
                        "x": _fmt(px),
                        "y": _fmt(py - 6),
                    },
                    text=zone.label,
                )
            )
        for tier in ("primary", "secondary", "tertiary"):
            if tier not in options.layers:
                continue
            for i in graph.tier_indices(tier):
                spec = graph.objects[i]
                box = placements[i].box(spec)
                px, py = tf.to_screen(box.center.x, box.center.y)
                parts.append(
                    _el(
                        "text",
                        {
                            "fill": pal["label"],
                            "font-family": "sans-serif",
                            "font-size": "10",
                            "text-anchor": "middle",
                            "x": _fmt(px),
                            "y": _fmt(py + 3),
                        },
                        text=spec.name,
                    )
                )
        parts.append("</g>")

    if metrics is not None:
        parts.append('<g id="metrics">')
        lines = [
            f"pathway {metrics.pathway_cost:.4f}",
            f"oor {metrics.oor_percent:.3f}%",
            f"oob {metrics.oob_percent:.3f}%",
        ]
        for k, line in enumerate(lines):
            parts.append(
                _el(
                    "text",
                    {
                        "fill": pal["label"],
                        "font-family": "monospace",
                        "font-size": "10",
                        "x": _fmt(4.0),
                        "y": _fmt(12.0 + 11.0 * k),
                    },
                    text=line,
                )
            )
        parts.append("</g>")

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
