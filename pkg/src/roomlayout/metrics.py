"""Quantitative layout evaluation.

Three scores: pathway cost (how badly furniture intrudes into the room's
natural walking corridors), overlap rate (shared footprint area as a fraction
of room area), and out-of-bounds rate (footprint area outside the room as a
fraction of room area).

The walking corridors are the dilated medial axis of the empty room; furniture
is scored by how far corridor points fall inside footprints.  Overlap counts
floor-standing object pairs plus door-swing conflicts, and tertiary objects
only against others of the same attachment type: a rug under a bed or a
painting above a dresser is not a conflict.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .geometry import (
    OrientedBox,
    Point2,
    box_polygon,
    convex_clip,
    medial_axis,
    overlap_area,
    world_to_local,
)
from .scene import LayoutGraph, Placement, Room, door_swing_polygon

PATHWAY_CELL = 0.05
PATHWAY_HALF_WIDTH = 0.3


def pathway_points(room: Room, cell: float = PATHWAY_CELL) -> list[Point2]:
    """The empty room's walking-corridor point set (0.6 m wide band around
    the medial axis).  Furniture does not reshape it; it only intrudes."""
    return medial_axis(room.width, room.length, [], cell, half_width=PATHWAY_HALF_WIDTH)


def intrusion_depth(p: Point2, box: OrientedBox) -> float:
    """Distance from a point to the box boundary when inside, else 0."""
    u, v = world_to_local(box, p.x, p.y)
    du = box.width / 2.0 - abs(u)
    dv = box.length / 2.0 - abs(v)
    if du <= 0.0 or dv <= 0.0:
        return 0.0
    return min(du, dv)


def pathway_cost(
    room: Room,
    boxes: Sequence[OrientedBox],
    cell: float = PATHWAY_CELL,
    points: Optional[Sequence[Point2]] = None,
) -> float:
    """Sum of squared intrusion depths of corridor points into footprints.

    Zero when no corridor point lies strictly inside any footprint.  Pass a
    precomputed point set to amortize the medial-axis computation.
    """
    if points is None:
        points = pathway_points(room, cell)
    total = 0.0
    for box in boxes:
        for p in points:
            d = intrusion_depth(p, box)
            if d > 0.0:
                total += d * d
    return total


def _swing_overlap(room: Room, box: OrientedBox) -> float:
    area = 0.0
    for door in room.doors:
        swing = door_swing_polygon(room, door)
        area += convex_clip(box_polygon(box), swing).area
    return area


def _oob_area(box: OrientedBox, room: Room) -> float:
    room_poly = box_polygon(
        OrientedBox(Point2(room.width / 2.0, room.length / 2.0), room.width, room.length, 0.0)
    )
    inside = convex_clip(box_polygon(box), room_poly).area
    deficit = box.area - inside
    # clipping a fully contained box reproduces it up to rounding noise
    if deficit < 1e-12:
        return 0.0
    return deficit


@dataclass(frozen=True)
class ObjectMetrics:
    index: int
    name: str
    tier: str
    overlap_area: float  # shared with partners or door swings; pair areas appear on both members
    oob_area: float
    pathway_cost: float

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "name": self.name,
            "tier": self.tier,
            "overlap_area": self.overlap_area,
            "oob_area": self.oob_area,
            "pathway_cost": self.pathway_cost,
        }


@dataclass(frozen=True)
class MetricsReport:
    pathway_cost: float
    oor_fraction: float
    oob_fraction: float
    pathway_point_count: int
    per_object: tuple[ObjectMetrics, ...]

    @property
    def oor_percent(self) -> float:
        return 100.0 * self.oor_fraction

    @property
    def oob_percent(self) -> float:
        return 100.0 * self.oob_fraction

    def to_dict(self) -> dict:
        return {
            "pathway_cost": self.pathway_cost,
            "oor_fraction": self.oor_fraction,
            "oob_fraction": self.oob_fraction,
            "oor_percent": self.oor_percent,
            "oob_percent": self.oob_percent,
            "pathway_point_count": self.pathway_point_count,
            "per_object": [m.to_dict() for m in self.per_object],
        }

    def table(self) -> str:
        """Human-readable summary with the per-object breakdown."""
        lines = [
            f"pathway cost     {self.pathway_cost:.6f}",
            f"overlap rate     {self.oor_fraction:.6f} ({self.oor_percent:.3f}%)",
            f"out of bounds    {self.oob_fraction:.6f} ({self.oob_percent:.3f}%)",
            f"pathway points   {self.pathway_point_count}",
            "",
            f"{'object':<20} {'tier':<10} {'overlap':>10} {'oob':>10} {'pathway':>10}",
        ]
        for m in self.per_object:
            lines.append(
                f"{m.name:<20} {m.tier:<10} {m.overlap_area:>10.4f} "
                f"{m.oob_area:>10.4f} {m.pathway_cost:>10.4f}"
            )
        return "\n".join(lines)


def _placed_boxes(
    graph: LayoutGraph, placements: Mapping[int, Placement], tiers: tuple[str, ...]
) -> list[tuple[int, OrientedBox]]:
    out = []
    for i, spec in enumerate(graph.objects):
        if spec.tier in tiers and i in placements:
            out.append((i, placements[i].box(spec)))
    return out


def oor(graph: LayoutGraph, placements: Mapping[int, Placement]) -> float:
    """Overlap rate: shared area divided by room area.

    Counts every floor-tier pair once, each floor object's door-swing
    conflict, and tertiary pairs sharing an attachment type.
    """
    return _overlap_total(graph, placements)[0] / graph.room.area


def _overlap_total(
    graph: LayoutGraph, placements: Mapping[int, Placement]
) -> tuple[float, dict[int, float]]:
    room = graph.room
    floor = _placed_boxes(graph, placements, ("primary", "secondary"))
    ter = _placed_boxes(graph, placements, ("tertiary",))
    per: dict[int, float] = {i: 0.0 for i in placements}
    total = 0.0
    for a in range(len(floor)):
        ia, box_a = floor[a]
        for b in range(a + 1, len(floor)):
            ib, box_b = floor[b]
            area = overlap_area(box_a, box_b)
            if area > 0.0:
                total += area
                per[ia] += area
                per[ib] += area
        swing = _swing_overlap(room, box_a)
        if swing > 0.0:
            total += swing
            per[ia] += swing
    for a in range(len(ter)):
        ia, box_a = ter[a]
        for b in range(a + 1, len(ter)):
            ib, box_b = ter[b]
            if graph.objects[ia].attach != graph.objects[ib].attach:
                continue
            area = overlap_area(box_a, box_b)
            if area > 0.0:
                total += area
                per[ia] += area
                per[ib] += area
    return total, per


def oob(graph: LayoutGraph, placements: Mapping[int, Placement]) -> float:
    """Out-of-bounds rate: footprint area outside the room over room area."""
    return _oob_total(graph, placements)[0] / graph.room.area


def _oob_total(
    graph: LayoutGraph, placements: Mapping[int, Placement]
) -> tuple[float, dict[int, float]]:
    per: dict[int, float] = {}
    total = 0.0
    for i, box in _placed_boxes(graph, placements, ("primary", "secondary", "tertiary")):
        a = _oob_area(box, graph.room)
        per[i] = a
        total += a
    return total, per


def compute_metrics(
    graph: LayoutGraph,
    placements: Mapping[int, Placement],
    cell: float = PATHWAY_CELL,
) -> MetricsReport:
    """Full report over a (possibly partial) placement mapping."""
    room = graph.room
    points = pathway_points(room, cell)
    floor = _placed_boxes(graph, placements, ("primary", "secondary"))
    path_per: dict[int, float] = {}
    path_total = 0.0
    for i, box in floor:
        c = pathway_cost(room, [box], cell, points=points)
        path_per[i] = c
        path_total += c
    overlap_total, overlap_per = _overlap_total(graph, placements)
    oob_total, oob_per = _oob_total(graph, placements)
    per_object = tuple(
        ObjectMetrics(
            index=i,
            name=graph.objects[i].name,
            tier=graph.objects[i].tier,
            overlap_area=overlap_per.get(i, 0.0),
            oob_area=oob_per.get(i, 0.0),
            pathway_cost=path_per.get(i, 0.0),
        )
        for i in sorted(placements)
    )
    return MetricsReport(
        pathway_cost=path_total,
        oor_fraction=overlap_total / room.area,
        oob_fraction=oob_total / room.area,
        pathway_point_count=len(points),
        per_object=per_object,
    )
