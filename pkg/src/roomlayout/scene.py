"""Domain model: rooms, openings, objects, zones, placements, constraint calls,
and the layout graph shared by the translator, solver, metrics, and renderer.

All value types are immutable.  Lengths are meters, angles radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence

from .geometry import ConvexPolygon, OrientedBox, Point2, normalize_angle

WALLS = ("south", "north", "east", "west")
TIERS = ("primary", "secondary", "tertiary")
ATTACH_KINDS = ("floor", "wall", "ceiling", "surface")

SCHEMA_GRAPH = "roomlayout/graph-v1"
SCHEMA_LAYOUT = "roomlayout/layout-v1"


@dataclass(frozen=True)
class Opening:
    """A door or window: a wall name, the offset of its center along that wall,
    and its width."""

    wall: str
    offset: float
    width: float
    kind: str

    def __post_init__(self):
        if self.wall not in WALLS:
            raise ValueError(f"unknown wall {self.wall!r}")
        if self.kind not in ("door", "window"):
            raise ValueError(f"unknown opening kind {self.kind!r}")
        if self.width <= 0:
            raise ValueError("opening width must be positive")


@dataclass(frozen=True)
class WallPoint:
    """A point feature on a wall, e.g. a power socket."""

    wall: str
    offset: float

    def __post_init__(self):
        if self.wall not in WALLS:
            raise ValueError(f"unknown wall {self.wall!r}")


@dataclass(frozen=True)
class Room:
    width: float
    length: float
    height: float = 3.0
    doors: tuple[Opening, ...] = ()
    windows: tuple[Opening, ...] = ()
    sockets: tuple[WallPoint, ...] = ()

    def __post_init__(self):
        if self.width <= 0 or self.length <= 0:
            raise ValueError(f"non-positive room dimensions {self.width}x{self.length}")
        object.__setattr__(self, "doors", tuple(self.doors))
        object.__setattr__(self, "windows", tuple(self.windows))
        object.__setattr__(self, "sockets", tuple(self.sockets))

    @property
    def area(self) -> float:
        return self.width * self.length

    @property
    def center(self) -> Point2:
        return Point2(self.width / 2.0, self.length / 2.0)

    def wall_extent(self, wall: str) -> float:
        """Length of the named wall segment."""
        return self.width if wall in ("south", "north") else self.length

    def wall_point(self, wall: str, offset: float) -> Point2:
        """World coordinates of the point at the given offset along a wall.

        Offsets run west to east on the south/north walls and south to north
        on the west/east walls.
        """
        if wall == "south":
            return Point2(offset, 0.0)
        if wall == "north":
            return Point2(offset, self.length)
        if wall == "west":
            return Point2(0.0, offset)
        if wall == "east":
            return Point2(self.width, offset)
        raise ValueError(f"unknown wall {wall!r}")

    def wall_distance(self, wall: str, p: Point2) -> float:
        """Perpendicular distance from a point to the named wall's line."""
        if wall == "south":
            return abs(p.y)
        if wall == "north":
            return abs(self.length - p.y)
        if wall == "west":
            return abs(p.x)
        if wall == "east":
            return abs(self.width - p.x)
        raise ValueError(f"unknown wall {wall!r}")


def wall_facing_angle(wall: str) -> float:
    """Orientation of an object standing against the wall and facing the room
    interior (compass theta: front vector is (sin theta, cos theta))."""
    return {"south": 0.0, "north": -math.pi, "east": -math.pi / 2, "west": math.pi / 2}[wall]


def angle_difference(a: float, b: float) -> float:
    """Wrapped signed difference a-b in [-pi, pi)."""
    return normalize_angle(a - b)


# world-frame (tangent, inward normal) unit vectors per wall; tangent points
# toward increasing offset
_WALL_FRAME = {
    "south": ((1.0, 0.0), (0.0, 1.0)),
    "north": ((1.0, 0.0), (0.0, -1.0)),
    "west": ((0.0, 1.0), (1.0, 0.0)),
    "east": ((0.0, 1.0), (-1.0, 0.0)),
}


def door_swing_polygon(room: Room, door: Opening) -> ConvexPolygon:
    """Quarter-disc swing buffer of a door as an 8-vertex convex polygon.

    The hinge sits at the jamb nearer the wall's low-offset end and the leaf
    sweeps a quarter circle of radius equal to the door width into the room.
    """
    hinge = room.wall_point(door.wall, door.offset - door.width / 2.0)
    (tx, ty), (nx, ny) = _WALL_FRAME[door.wall]
    pts = [(hinge.x, hinge.y)]
    for k in range(7):
        a = (math.pi / 2.0) * k / 6.0
        dx = door.width * (math.cos(a) * tx + math.sin(a) * nx)
        dy = door.width * (math.cos(a) * ty + math.sin(a) * ny)
        pts.append((hinge.x + dx, hinge.y + dy))
    return ConvexPolygon(pts)


def opening_strip(room: Room, opening: Opening, depth: float) -> OrientedBox:
    """Axis-aligned strip of the given depth extending inward from an opening,
    spanning the opening's width.  Used as a keep-clear buffer."""
    center_on_wall = room.wall_point(opening.wall, opening.offset)
    (_, _), (nx, ny) = _WALL_FRAME[opening.wall]
    cx = center_on_wall.x + nx * depth / 2.0
    cy = center_on_wall.y + ny * depth / 2.0
    if opening.wall in ("south", "north"):
        return OrientedBox(Point2(cx, cy), opening.width, depth, 0.0)
    return OrientedBox(Point2(cx, cy), depth, opening.width, 0.0)


@dataclass(frozen=True)
class ObjectSpec:
    """An object to be placed: name, tier, footprint dimensions, and the raw
    natural-language constraints attached to it.

    width is the left-right extent and length the front-back extent in the
    object's own frame.  count_group links duplicates expanded from one request
    ("two nightstands").  attach is always floor for primary/secondary tiers.
    """

    name: str
    tier: str
    width: float
    length: float
    zone_id: Optional[str] = None
    style: str = ""
    attach: str = "floor"
    count_group: Optional[str] = None
    raw_constraints: tuple[str, ...] = ()

    def __post_init__(self):
        if self.tier not in TIERS:
            raise ValueError(f"unknown tier {self.tier!r}")
        if self.attach not in ATTACH_KINDS:
            raise ValueError(f"unknown attach kind {self.attach!r}")
        if self.width <= 0 or self.length <= 0:
            raise ValueError(f"non-positive object dimensions for {self.name!r}")
        object.__setattr__(self, "raw_constraints", tuple(self.raw_constraints))


@dataclass(frozen=True)
class Placement:
    x: float
    y: float
    theta: float

    def __post_init__(self):
        for v in (self.x, self.y, self.theta):
            if not math.isfinite(v):
                raise ValueError("placement coordinates must be finite")
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    @property
    def point(self) -> Point2:
        return Point2(self.x, self.y)

    def box(self, spec: ObjectSpec) -> OrientedBox:
        return OrientedBox(Point2(self.x, self.y), spec.width, spec.length, self.theta)


@dataclass(frozen=True)
class Zone:
    """A functional region (sleeping, storage, ...) ranked by significance.
    Its geometry is the Voronoi cell of its centroid."""

    id: str
    label: str
    centroid: Point2
    rank: int


@dataclass(eq=True)
class ConstraintCall:
    """A bound invocation of a registry cost function: which function, which
    object(s), with what parameters, at what weight.  source keeps the
    sentence the call was translated from."""

    function_id: str
    subject: int
    object2: Optional[int] = None
    params: dict[str, Any] = field(default_factory=dict)
    weight: float = 1.0
    source: Optional[str] = None


@dataclass(frozen=True)
class LayoutGraph:
    """Objects as nodes, bound constraint calls as edges, plus the room and
    zone list; the solver's input."""

    room: Room
    objects: tuple[ObjectSpec, ...]
    calls: tuple[ConstraintCall, ...]
    zones: tuple[Zone, ...]

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "calls", tuple(self.calls))
        object.__setattr__(self, "zones", tuple(self.zones))

    def tier_indices(self, tier: str) -> list[int]:
        return [i for i, o in enumerate(self.objects) if o.tier == tier]

    def zone_by_id(self, zone_id: str) -> Optional[Zone]:
        for z in self.zones:
            if z.id == zone_id:
                return z
        return None


def zone_centroid_update(graph: LayoutGraph, placements: Mapping[int, Placement]) -> list[Zone]:
    """Recompute each zone centroid as the mean position of its placed objects.

    Zones with no placed object keep their previous centroid.  Iteration is in
    object-index order, so the result is independent of mapping order.
    """
    sums: dict[str, list[float]] = {z.id: [0.0, 0.0, 0] for z in graph.zones}
    for idx in sorted(placements):
        spec = graph.objects[idx]
        if spec.zone_id is None or spec.zone_id not in sums:
            continue
        acc = sums[spec.zone_id]
        pl = placements[idx]
        acc[0] += pl.x
        acc[1] += pl.y
        acc[2] += 1
    out = []
    for z in graph.zones:
        sx, sy, n = sums[z.id]
        centroid = Point2(sx / n, sy / n) if n else z.centroid
        out.append(Zone(z.id, z.label, centroid, z.rank))
    return out


def validate_graph(graph: LayoutGraph) -> list[str]:
    """Structural diagnostics for a layout graph; empty iff well-formed.

    Returns messages, never raises: a malformed graph must still be reportable.
    """
    issues: list[str] = []
    room = graph.room
    for opening in (*room.doors, *room.windows):
        extent = room.wall_extent(opening.wall)
        if opening.offset - opening.width / 2.0 < -1e-9 or opening.offset + opening.width / 2.0 > extent + 1e-9:
            issues.append(
                f"{opening.kind} at offset {opening.offset} exceeds the {opening.wall} wall (extent {extent})"
            )
    for door in room.doors:
        if door.kind != "door":
            issues.append(f"opening in doors list has kind {door.kind!r}")
    for window in room.windows:
        if window.kind != "window":
            issues.append(f"opening in windows list has kind {window.kind!r}")
    for socket in room.sockets:
        if not 0.0 <= socket.offset <= room.wall_extent(socket.wall):
            issues.append(f"socket offset {socket.offset} outside the {socket.wall} wall")

    zone_ids = {z.id for z in graph.zones}
    zone_primary_count: dict[str, int] = {z.id: 0 for z in graph.zones}
    for i, obj in enumerate(graph.objects):
        if obj.zone_id is not None and obj.zone_id not in zone_ids:
            issues.append(f"object {i} ({obj.name}) references unknown zone {obj.zone_id!r}")
        if obj.tier in ("primary", "secondary") and obj.attach != "floor":
            issues.append(f"object {i} ({obj.name}) is {obj.tier} but attaches to {obj.attach}")
        if obj.tier == "primary":
            if obj.zone_id is None:
                issues.append(f"primary object {i} ({obj.name}) has no zone")
            elif obj.zone_id in zone_primary_count:
                zone_primary_count[obj.zone_id] += 1
        if obj.tier == "tertiary" and len(obj.raw_constraints) != 1:
            issues.append(
                f"tertiary object {i} ({obj.name}) carries {len(obj.raw_constraints)} raw constraints, expected 1"
            )
    for zid, n in zone_primary_count.items():
        if n != 1:
            issues.append(f"zone {zid!r} anchored by {n} primary objects, expected 1")

    n_obj = len(graph.objects)
    for k, call in enumerate(graph.calls):
        for ref in (call.subject, call.object2):
            if ref is not None and not 0 <= ref < n_obj:
                issues.append(f"call {k} ({call.function_id}) references object index {ref} of {n_obj}")
    return issues


# --- JSON (de)serialization -------------------------------------------------


def _opening_to_dict(o: Opening) -> dict:
    return {"wall": o.wall, "offset": o.offset, "width": o.width, "kind": o.kind}


def _room_to_dict(room: Room) -> dict:
    return {
        "width": room.width,
        "length": room.length,
        "height": room.height,
        "doors": [_opening_to_dict(d) for d in room.doors],
        "windows": [_opening_to_dict(w) for w in room.windows],
        "sockets": [{"wall": s.wall, "offset": s.offset} for s in room.sockets],
    }


def _room_from_dict(d: dict) -> Room:
    return Room(
        width=d["width"],
        length=d["length"],
        height=d.get("height", 3.0),
        doors=tuple(Opening(**o) for o in d.get("doors", ())),
        windows=tuple(Opening(**o) for o in d.get("windows", ())),
        sockets=tuple(WallPoint(**s) for s in d.get("sockets", ())),
    )


def graph_to_dict(graph: LayoutGraph) -> dict:
    return {
        "schema": SCHEMA_GRAPH,
        "room": _room_to_dict(graph.room),
        "zones": [
            {"id": z.id, "label": z.label, "centroid": [z.centroid.x, z.centroid.y], "rank": z.rank}
            for z in graph.zones
        ],
        "objects": [
            {
                "name": o.name,
                "tier": o.tier,
                "width": o.width,
                "length": o.length,
                "zone": o.zone_id,
                "style": o.style,
                "attach": o.attach,
                "count_group": o.count_group,
                "raw_constraints": list(o.raw_constraints),
            }
            for o in graph.objects
        ],
        "calls": [
            {
                "function": c.function_id,
                "subject": c.subject,
                "object2": c.object2,
                "params": c.params,
                "weight": c.weight,
                "source": c.source,
            }
            for c in graph.calls
        ],
    }


def graph_from_dict(d: dict) -> LayoutGraph:
    schema = d.get("schema", SCHEMA_GRAPH)
    if schema not in (SCHEMA_GRAPH, SCHEMA_LAYOUT):
        raise ValueError(f"unsupported graph schema {schema!r}")
    return LayoutGraph(
        room=_room_from_dict(d["room"]),
        objects=tuple(
            ObjectSpec(
                name=o["name"],
                tier=o["tier"],
                width=o["width"],
                length=o["length"],
                zone_id=o.get("zone"),
                style=o.get("style", ""),
                attach=o.get("attach", "floor"),
                count_group=o.get("count_group"),
                raw_constraints=tuple(o.get("raw_constraints", ())),
            )
            for o in d["objects"]
        ),
        calls=tuple(
            ConstraintCall(
                function_id=c["function"],
                subject=c["subject"],
                object2=c.get("object2"),
                params=dict(c.get("params", {})),
                weight=c.get("weight", 1.0),
                source=c.get("source"),
            )
            for c in d.get("calls", ())
        ),
        zones=tuple(
            Zone(z["id"], z["label"], Point2(z["centroid"][0], z["centroid"][1]), z["rank"])
            for z in d.get("zones", ())
        ),
    )


def layout_to_dict(graph: LayoutGraph, placements: Sequence[Optional[Placement]]) -> dict:
    """Graph plus per-object placements (null for unplaced objects)."""
    if len(placements) != len(graph.objects):
        raise ValueError("placements list must match the object list")
    d = graph_to_dict(graph)
    d["schema"] = SCHEMA_LAYOUT
    d["placements"] = [
        None if p is None else {"x": p.x, "y": p.y, "theta": p.theta} for p in placements
    ]
    return d


def layout_from_dict(d: dict) -> tuple[LayoutGraph, list[Optional[Placement]]]:
    graph = graph_from_dict(d)
    placements = [
        None if p is None else Placement(p["x"], p["y"], p["theta"])
        for p in d.get("placements", [None] * len(graph.objects))
    ]
    if len(placements) != len(graph.objects):
        raise ValueError("placements list must match the object list")
    return graph, placements
