"""The constraint cost-function library.

Two layers live here:

* Default costs applied at every optimization stage: overlap, bounds,
  alignment, balance, wall attraction, zoning, and wall mounting.
* The named registry of language-constraint functions that translated
  constraints bind against.  Each registry entry carries a docstring and a
  JSON parameter schema; the machine-readable manifest of the registry is what
  the language model sees when translating.

Every cost is a nonnegative scalar, zero when the constraint is satisfied,
and smooth almost everywhere (threshold constraints use squared hinges).
A bound call whose parameters fail schema validation degrades to a constant
zero term rather than raising, so one bad translation cannot poison a solve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Callable, Mapping, Optional, Sequence

import jsonschema

from .geometry import (
    ConvexPolygon,
    OrientedBox,
    Point2,
    box_polygon,
    convex_clip,
    dist_point_boundary,
    dist_point_box,
    facing_vector,
    obb_corners,
    side_cost,
)
from .scene import (
    ConstraintCall,
    LayoutGraph,
    Placement,
    Room,
    WALLS,
    Zone,
    angle_difference,
    door_swing_polygon,
    opening_strip,
    wall_facing_angle,
)

# depth of the keep-clear strip in front of a window
WINDOW_CLEAR_DEPTH = 0.6
# thickness of the window strip used for wall-mount overlap checks
WINDOW_GLASS_DEPTH = 0.1
# side of the keep-clear square around a socket
SOCKET_CLEAR_SIZE = 0.3
# snap width for exact zeros of the alignment cost at cardinal angles
_ALIGN_SNAP = 1e-9


@dataclass(frozen=True)
class SolverWeights:
    """Scale factors of the staged objectives plus the wall-attraction
    threshold T.  Defaults are the tuned values used across all experiments."""

    lambda1: float = 100.0  # door-buffer term inside the overlap cost
    lambda2: float = 20.0  # wall-attraction divisor
    lambda3: float = 5.0  # overlap weight, primary/secondary stages
    lambda4: float = 10.0  # balance weight, primary stage
    lambda5: float = 10.0  # bounds weight, primary/secondary stages
    lambda6: float = 10.0  # zone weight, secondary stage
    lambda7: float = 500.0  # bounds weight, tertiary stage
    lambda8: float = 500.0  # opening-overlap term inside the wall-mount cost
    wall_threshold: float = 1.0  # T, meters

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "lambda3", "lambda4", "lambda5",
                     "lambda6", "lambda7", "lambda8", "wall_threshold"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


DEFAULT_WEIGHTS = SolverWeights()


@lru_cache(maxsize=32)
def _door_polygons(room: Room) -> tuple[ConvexPolygon, ...]:
    return tuple(door_swing_polygon(room, d) for d in room.doors)


class EvalContext:
    """Placement state used while evaluating costs: the graph, the current
    placements, the active object set, and the current zone list.  Footprint
    boxes are cached per context instance."""

    __slots__ = ("graph", "room", "placements", "active", "zones", "_boxes")

    def __init__(
        self,
        graph: LayoutGraph,
        placements: Mapping[int, Placement],
        active: Optional[Sequence[int]] = None,
        zones: Optional[Sequence[Zone]] = None,
    ):
        self.graph = graph
        self.room = graph.room
        self.placements = dict(placements)
        self.active = tuple(sorted(self.placements)) if active is None else tuple(active)
        self.zones = tuple(graph.zones if zones is None else zones)
        self._boxes: dict[int, OrientedBox] = {}

    def box(self, idx: int) -> OrientedBox:
        b = self._boxes.get(idx)
        if b is None:
            b = self.placements[idx].box(self.graph.objects[idx])
            self._boxes[idx] = b
        return b

    def has(self, idx: Optional[int]) -> bool:
        return idx is not None and idx in self.placements


# --- default costs ----------------------------------------------------------


def no_overlap(
    ctx: EvalContext,
    weights: SolverWeights = DEFAULT_WEIGHTS,
    active_set: Optional[Sequence[int]] = None,
) -> float:
    """Pairwise footprint intersection cost over the active set, plus the
    door-swing term: every object is also clipped against each door's swing
    buffer, scaled by lambda1."""
    total = 0.0
    active = ctx.active if active_set is None else tuple(active_set)
    doors = _door_polygons(ctx.room)
    for pos, i in enumerate(active):
        poly_i = box_polygon(ctx.box(i))
        for j in active[pos + 1:]:
            total += side_cost(convex_clip(poly_i, box_polygon(ctx.box(j))))
        for dpoly in doors:
            total += weights.lambda1 * side_cost(convex_clip(poly_i, dpoly))
    return total


def no_overlap_same_type(ctx: EvalContext, indices: Sequence[int]) -> float:
    """Tertiary-stage overlap: only objects sharing an attach type repel each
    other; a painting may overlap a rug."""
    total = 0.0
    idxs = list(indices)
    for pos, i in enumerate(idxs):
        attach_i = ctx.graph.objects[i].attach
        poly_i = box_polygon(ctx.box(i))
        for j in idxs[pos + 1:]:
            if ctx.graph.objects[j].attach == attach_i:
                total += side_cost(convex_clip(poly_i, box_polygon(ctx.box(j))))
    return total


def in_bounds(box: OrientedBox, room: Room) -> float:
    """Sum of squared boundary distances of footprint corners lying outside
    the room."""
    total = 0.0
    for c in obb_corners(box):
        if 0.0 <= c.x <= room.width and 0.0 <= c.y <= room.length:
            continue
        d = dist_point_boundary(c, room.width, room.length)
        total += d * d
    return total


def aligned(theta: float) -> float:
    """sin^2(2 theta) / 5, snapped to an exact zero at cardinal angles."""
    s = math.sin(2.0 * theta)
    if abs(s) < _ALIGN_SNAP:
        return 0.0
    return s * s / 5.0


def balanced(ctx: EvalContext, active_set: Optional[Sequence[int]] = None) -> float:
    """Squared deviation of the area-weighted centroid of the active objects
    from the room center, summed per axis."""
    sw = sx = sy = 0.0
    for i in (ctx.active if active_set is None else active_set):
        spec = ctx.graph.objects[i]
        a = spec.width * spec.length
        pl = ctx.placements[i]
        sw += a
        sx += a * pl.x
        sy += a * pl.y
    if sw == 0.0:
        return 0.0
    dx = sx / sw - ctx.room.width / 2.0
    dy = sy / sw - ctx.room.length / 2.0
    return dx * dx + dy * dy


def wall_attraction(box: OrientedBox, room: Room, weights: SolverWeights = DEFAULT_WEIGHTS) -> float:
    """Hinge penalty when the centroid's nearest-wall distance exceeds the
    threshold T, scaled down by lambda2."""
    d = min(room.wall_distance(w, box.center) for w in WALLS)
    t = min(weights.wall_threshold - d, 0.0)
    return t * t / weights.lambda2


def zone_keep(p: Point2, zones: Sequence[Zone], own_zone_id: str) -> float:
    """Squared-hinge penalty for sitting closer to a foreign zone centroid
    than to the object's own."""
    own = next((z for z in zones if z.id == own_zone_id), None)
    if own is None:
        return 0.0
    d_own = math.hypot(p.x - own.centroid.x, p.y - own.centroid.y)
    total = 0.0
    for z in zones:
        if z.id == own_zone_id:
            continue
        d = math.hypot(p.x - z.centroid.x, p.y - z.centroid.y)
        t = min(d - d_own, 0.0)
        total += t * t
    return total


def on_wall(box: OrientedBox, room: Room, weights: SolverWeights = DEFAULT_WEIGHTS) -> float:
    """Wall-mount cost: keep clear of doors and windows (lambda8-scaled
    overlap) and sit on some wall facing inward (product over walls of
    centroid distance plus wrapped squared angle error)."""
    poly = box_polygon(box)
    total = 0.0
    for dpoly in _door_polygons(room):
        total += weights.lambda8 * side_cost(convex_clip(poly, dpoly))
    for w in room.windows:
        strip = box_polygon(opening_strip(room, w, WINDOW_GLASS_DEPTH))
        total += weights.lambda8 * side_cost(convex_clip(poly, strip))
    prod = 1.0
    for wall in WALLS:
        ang = angle_difference(box.theta, wall_facing_angle(wall))
        prod *= room.wall_distance(wall, box.center) + ang * ang
    return total + prod


# --- registry of language-constraint functions ------------------------------


def _fixed_points(room: Room, kind: str) -> list[Point2]:
    if kind == "door":
        return [room.wall_point(d.wall, d.offset) for d in room.doors]
    if kind == "window":
        return [room.wall_point(w.wall, w.offset) for w in room.windows]
    if kind == "socket":
        return [room.wall_point(s.wall, s.offset) for s in room.sockets]
    return []


_SIDE_ALIASES = {"top": "front", "bottom": "back"}
# per side (in the object frame): unit offset direction and whether the strip
# spans the object's width or length
_SIDE_FRAMES = {
    "front": ((0.0, 1.0), "width"),
    "back": ((0.0, -1.0), "width"),
    "left": ((-1.0, 0.0), "length"),
    "right": ((1.0, 0.0), "length"),
}


def _local_to_world(box: OrientedBox, lx: float, ly: float) -> tuple[float, float]:
    c, s = math.cos(box.theta), math.sin(box.theta)
    return (box.center.x + c * lx + s * ly, box.center.y - s * lx + c * ly)


def side_strip(box: OrientedBox, side: str, depth: float) -> OrientedBox:
    """Clearance strip attached to one side of a footprint, in world frame."""
    side = _SIDE_ALIASES.get(side, side)
    (dx, dy), span = _SIDE_FRAMES[side]
    if span == "width":
        half = box.length / 2.0 + depth / 2.0
        w, l = box.width, depth
    else:
        half = box.width / 2.0 + depth / 2.0
        w, l = depth, box.length
    cx, cy = _local_to_world(box, dx * half, dy * half)
    return OrientedBox(Point2(cx, cy), w, l, box.theta)


def _impl_next_to_wall(ctx: EvalContext, call: ConstraintCall) -> float:
    box = ctx.box(call.subject)
    room = ctx.room
    corners = obb_corners(box)
    best = math.inf
    for wall in WALLS:
        gaps = []
        for c in corners:
            if wall == "south":
                gaps.append(c.y)
            elif wall == "north":
                gaps.append(room.length - c.y)
            elif wall == "west":
                gaps.append(c.x)
            else:
                gaps.append(room.width - c.x)
        best = min(best, max(min(gaps), 0.0))
    return best * best


def _impl_away_from_fixed(ctx: EvalContext, call: ConstraintCall) -> float:
    box = ctx.box(call.subject)
    min_dist = call.params.get("min_dist", 0.5)
    total = 0.0
    for pt in _fixed_points(ctx.room, call.params["fixed_object_type"]):
        d = math.hypot(box.center.x - pt.x, box.center.y - pt.y)
        t = max(min_dist - d, 0.0)
        total += t * t
    return total


def _impl_close_to_fixed(ctx: EvalContext, call: ConstraintCall) -> float:
    box = ctx.box(call.subject)
    max_dist = call.params.get("max_dist", 1.0)
    pts = _fixed_points(ctx.room, call.params["fixed_object_type"])
    if not pts:
        return 0.0
    d = min(math.hypot(box.center.x - p.x, box.center.y - p.y) for p in pts)
    t = max(d - max_dist, 0.0)
    return t * t


def _socket_clear_box(room: Room, wall: str, offset: float) -> OrientedBox:
    pt = room.wall_point(wall, offset)
    inward = {"south": (0.0, 1.0), "north": (0.0, -1.0), "west": (1.0, 0.0), "east": (-1.0, 0.0)}[wall]
    half = SOCKET_CLEAR_SIZE / 2.0
    return OrientedBox(
        Point2(pt.x + inward[0] * half, pt.y + inward[1] * half),
        SOCKET_CLEAR_SIZE,
        SOCKET_CLEAR_SIZE,
        0.0,
    )


def _impl_not_block(ctx: EvalContext, call: ConstraintCall) -> float:
    box = ctx.box(call.subject)
    poly = box_polygon(box)
    room = ctx.room
    kind = call.params["fixed_object_type"]
    total = 0.0
    if kind == "door":
        for dpoly in _door_polygons(room):
            total += side_cost(convex_clip(poly, dpoly))
    elif kind == "window":
        for w in room.windows:
            strip = box_polygon(opening_strip(room, w, WINDOW_CLEAR_DEPTH))
            total += side_cost(convex_clip(poly, strip))
    else:
        for s in room.sockets:
            clear = box_polygon(_socket_clear_box(room, s.wall, s.offset))
            total += side_cost(convex_clip(poly, clear))
    return total


def _impl_accessible(ctx: EvalContext, call: ConstraintCall) -> float:
    box = ctx.box(call.subject)
    depth = call.params.get("clearance", 0.6)
    total = 0.0
    for side in call.params["sides"]:
        strip = box_polygon(side_strip(box, side, depth))
        for j in ctx.active:
            if j == call.subject:
                continue
            total += side_cost(convex_clip(strip, box_polygon(ctx.box(j))))
    return total


def _impl_face_into_room(ctx: EvalContext, call: ConstraintCall) -> float:
    box = ctx.box(call.subject)
    room = ctx.room
    nearest = min(WALLS, key=lambda w: room.wall_distance(w, box.center))
    inward = {"south": (0.0, 1.0), "north": (0.0, -1.0), "west": (1.0, 0.0), "east": (-1.0, 0.0)}
    nx, ny = inward[nearest]
    fx, fy = facing_vector(box.theta)
    t = max(-(fx * nx + fy * ny), 0.0)
    return t * t


def _impl_central(ctx: EvalContext, call: ConstraintCall) -> float:
    box = ctx.box(call.subject)
    dx = box.center.x - ctx.room.width / 2.0
    dy = box.center.y - ctx.room.length / 2.0
    return dx * dx + dy * dy


def _impl_under_window(ctx: EvalContext, call: ConstraintCall) -> float:
    box = ctx.box(call.subject)
    pts = _fixed_points(ctx.room, "window")
    if not pts:
        return 0.0
    reach = math.hypot(box.width, box.length) / 2.0
    d = min(math.hypot(box.center.x - p.x, box.center.y - p.y) for p in pts)
    t = max(d - reach, 0.0)
    return t * t


def _centers(ctx: EvalContext, call: ConstraintCall):
    return ctx.box(call.subject).center, ctx.box(call.object2).center


def _impl_near(ctx: EvalContext, call: ConstraintCall) -> float:
    a, b = _centers(ctx, call)
    d = math.hypot(a.x - b.x, a.y - b.y)
    t = max(d - call.params.get("max_dist", 1.0), 0.0)
    return t * t


def _impl_far(ctx: EvalContext, call: ConstraintCall) -> float:
    a, b = _centers(ctx, call)
    d = math.hypot(a.x - b.x, a.y - b.y)
    t = max(call.params.get("min_dist", 1.0) - d, 0.0)
    return t * t


def _impl_adjacent(ctx: EvalContext, call: ConstraintCall) -> float:
    sub = ctx.box(call.subject)
    tgt = ctx.box(call.object2)
    side = _SIDE_ALIASES.get(call.params["side"], call.params["side"])
    (dx, dy), span = _SIDE_FRAMES[side]
    if span == "width":
        off = tgt.length / 2.0 + sub.length / 2.0
    else:
        off = tgt.width / 2.0 + sub.width / 2.0
    ix, iy = _local_to_world(tgt, dx * off, dy * off)
    ex, ey = sub.center.x - ix, sub.center.y - iy
    return ex * ex + ey * ey


def _impl_facing(ctx: EvalContext, call: ConstraintCall) -> float:
    a, b = _centers(ctx, call)
    d = math.hypot(b.x - a.x, b.y - a.y)
    if d < 1e-9:
        return 0.0
    fx, fy = facing_vector(ctx.box(call.subject).theta)
    t = 1.0 - (fx * (b.x - a.x) + fy * (b.y - a.y)) / d
    return t * t


def _impl_not_facing(ctx: EvalContext, call: ConstraintCall) -> float:
    a, b = _centers(ctx, call)
    d = math.hypot(b.x - a.x, b.y - a.y)
    if d < 1e-9:
        return 0.0
    fx, fy = facing_vector(ctx.box(call.subject).theta)
    t = (fx * (b.x - a.x) + fy * (b.y - a.y)) / d - math.cos(math.pi / 4.0)
    t = max(t, 0.0)
    return t * t


def _impl_between(ctx: EvalContext, call: ConstraintCall) -> float:
    other = call.params["other"]
    if not (ctx.has(call.object2) and ctx.has(other)):
        return 0.0
    s = ctx.box(call.subject).center
    a = ctx.box(call.object2).center
    b = ctx.box(other).center
    mx, my = (a.x + b.x) / 2.0, (a.y + b.y) / 2.0
    return (s.x - mx) ** 2 + (s.y - my) ** 2


def _impl_aligned_with(ctx: EvalContext, call: ConstraintCall) -> float:
    a, b = _centers(ctx, call)
    return min((a.x - b.x) ** 2, (a.y - b.y) ** 2)


def _impl_on_surface_of(ctx: EvalContext, call: ConstraintCall) -> float:
    sub = ctx.box(call.subject)
    parent = ctx.box(call.object2)
    total = 0.0
    for c in obb_corners(sub):
        d = dist_point_box(c, parent)
        total += d * d
    return total


def _impl_above(ctx: EvalContext, call: ConstraintCall) -> float:
    sub = ctx.box(call.subject)
    parent = ctx.box(call.object2)
    room = ctx.room
    wall = min(WALLS, key=lambda w: room.wall_distance(w, parent.center))
    px, py = parent.center.x, parent.center.y
    proj = {
        "south": (px, 0.0),
        "north": (px, room.length),
        "west": (0.0, py),
        "east": (room.width, py),
    }[wall]
    return (sub.center.x - proj[0]) ** 2 + (sub.center.y - proj[1]) ** 2


def _impl_under(ctx: EvalContext, call: ConstraintCall) -> float:
    a, b = _centers(ctx, call)
    return (a.x - b.x) ** 2 + (a.y - b.y) ** 2


_impl_on_ceiling_near = _impl_under


@dataclass(frozen=True)
class RegistryEntry:
    function_id: str
    kind: str  # individual | pairwise | tertiary
    doc: str
    schema: dict
    impl: Callable[[EvalContext, ConstraintCall], float]
    needs_object2: bool = False
    # True when the cost reads the whole active set, not just the named
    # participants; such terms stay live in every later stage
    field: bool = False


def _schema(properties: dict, required: Sequence[str] = ()) -> dict:
    return {
        "type": "object",
        "properties": properties,
        "required": list(required),
        "additionalProperties": False,
    }


_NUMBER_POS = {"type": "number", "exclusiveMinimum": 0}
_FIXED_TYPE = {"enum": ["door", "window", "socket"]}
_SIDE_ENUM = {"enum": ["front", "back", "left", "right", "top", "bottom"]}

REGISTRY: dict[str, RegistryEntry] = {}


def _register(entry: RegistryEntry) -> None:
    REGISTRY[entry.function_id] = entry


_register(RegistryEntry(
    "ind_next_to_wall",
    "individual",
    "Keep the object flush against some wall. Zero when any footprint edge "
    "touches a wall; otherwise the squared gap to the nearest wall. "
    "Example: a bed whose headboard needs wall support.",
    _schema({}),
    _impl_next_to_wall,
))
_register(RegistryEntry(
    "ind_away_from_fixed_object",
    "individual",
    "Keep the object's centroid at least min_dist meters from every fixed "
    "feature of the given type (door, window, or socket). Squared hinge per "
    "feature. Example: keep a bed 2 m away from electrical sockets.",
    _schema(
        {"fixed_object_type": _FIXED_TYPE, "min_dist": {"type": "number", "minimum": 0}},
        ["fixed_object_type"],
    ),
    _impl_away_from_fixed,
))
_register(RegistryEntry(
    "ind_close_to_fixed_object",
    "individual",
    "Keep the object's centroid within max_dist meters of the nearest fixed "
    "feature of the given type. Example: place a desk close to a window for "
    "natural light.",
    _schema(
        {"fixed_object_type": _FIXED_TYPE, "max_dist": {"type": "number", "minimum": 0}},
        ["fixed_object_type"],
    ),
    _impl_close_to_fixed,
))
_register(RegistryEntry(
    "ind_not_block",
    "individual",
    "Keep the object's footprint out of the clearance region of every fixed "
    "feature of the given type: door swing arcs, a 0.6 m strip in front of "
    "windows, or a small square around sockets. Example: a wardrobe must not "
    "block any doors or windows.",
    _schema({"fixed_object_type": _FIXED_TYPE}, ["fixed_object_type"]),
    _impl_not_block,
))
_register(RegistryEntry(
    "ind_accessible",
    "individual",
    "Keep a clearance strip (default 0.6 m deep) on the named sides of the "
    "object free of other objects. Sides are in the object's own frame: "
    "front/back/left/right, with top and bottom accepted as aliases of front "
    "and back. Example: a bed needing clear access on the left and bottom.",
    _schema(
        {
            "sides": {"type": "array", "items": _SIDE_ENUM, "minItems": 1},
            "clearance": _NUMBER_POS,
        },
        ["sides"],
    ),
    _impl_accessible,
    field=True,
))
_register(RegistryEntry(
    "ind_face_into_room",
    "individual",
    "Orient the object's front away from its nearest wall, toward the room "
    "interior. Example: a television or sofa should not face the wall.",
    _schema({}),
    _impl_face_into_room,
))
_register(RegistryEntry(
    "ind_central",
    "individual",
    "Pull the object's centroid toward the room center. Squared distance. "
    "Example: a dining table in the middle of the room.",
    _schema({}),
    _impl_central,
))
_register(RegistryEntry(
    "ind_under_window",
    "individual",
    "Place the object at a window: squared hinge on the centroid distance to "
    "the nearest window beyond the footprint's half-diagonal reach. Example: "
    "a plant or desk under the window.",
    _schema({}),
    _impl_under_window,
))
_register(RegistryEntry(
    "pair_near",
    "pairwise",
    "Keep the two objects' centroids within max_dist meters (default 1). "
    "Squared hinge. Example: a nightstand near the bed.",
    _schema({"max_dist": {"type": "number", "minimum": 0}}),
    _impl_near,
    needs_object2=True,
))
_register(RegistryEntry(
    "pair_far",
    "pairwise",
    "Keep the two objects' centroids at least min_dist meters apart "
    "(default 1). Squared hinge. Example: keep the desk far from the bed.",
    _schema({"min_dist": {"type": "number", "minimum": 0}}),
    _impl_far,
    needs_object2=True,
))
_register(RegistryEntry(
    "pair_adjacent",
    "pairwise",
    "Place the subject touching the given side of the second object (side "
    "named in that object's frame: front/back/left/right, top/bottom "
    "aliases). Squared distance to the ideal adjacent position. Example: a "
    "nightstand on the left side of the bed.",
    _schema({"side": _SIDE_ENUM}, ["side"]),
    _impl_adjacent,
    needs_object2=True,
))
_register(RegistryEntry(
    "pair_facing",
    "pairwise",
    "Orient the subject's front toward the second object. Zero when pointing "
    "exactly at it. Example: a chair facing the desk.",
    _schema({}),
    _impl_facing,
    needs_object2=True,
))
_register(RegistryEntry(
    "pair_not_facing",
    "pairwise",
    "Keep the subject's front at least 45 degrees away from the direction of "
    "the second object. Example: the mirror should not face the bed.",
    _schema({}),
    _impl_not_facing,
    needs_object2=True,
))
_register(RegistryEntry(
    "pair_between",
    "pairwise",
    "Place the subject at the midpoint of the second object and the object "
    "given by the integer parameter 'other'. Example: the bed between the "
    "two nightstands.",
    _schema({"other": {"type": "integer", "minimum": 0}}, ["other"]),
    _impl_between,
    needs_object2=True,
))
_register(RegistryEntry(
    "pair_aligned_with",
    "pairwise",
    "Align the subject with the second object along either room axis: the "
    "smaller of the squared x-difference and squared y-difference of their "
    "centroids. Example: chairs lined up with the table.",
    _schema({}),
    _impl_aligned_with,
    needs_object2=True,
))
_register(RegistryEntry(
    "ter_on_surface_of",
    "tertiary",
    "Keep the subject's footprint entirely on top of the parent object "
    "(second object): squared distances of corners sticking out. Example: a "
    "lamp on the nightstand.",
    _schema({}),
    _impl_on_surface_of,
    needs_object2=True,
))
_register(RegistryEntry(
    "ter_above",
    "tertiary",
    "Mount the subject on the wall nearest the parent object (second "
    "object), directly above it: squared distance to the parent centroid's "
    "projection onto that wall. Example: a painting above the bed.",
    _schema({}),
    _impl_above,
    needs_object2=True,
))
_register(RegistryEntry(
    "ter_under",
    "tertiary",
    "Center the subject under the parent object (second object), rug-style: "
    "squared centroid distance. Example: a rug under the coffee table.",
    _schema({}),
    _impl_under,
    needs_object2=True,
))
_register(RegistryEntry(
    "ter_on_ceiling_near",
    "tertiary",
    "Place the ceiling-mounted subject over the anchor object (second "
    "object): squared centroid distance. Example: a pendant light over the "
    "dining table.",
    _schema({}),
    _impl_on_ceiling_near,
    needs_object2=True,
))


def registry_manifest() -> list[dict]:
    """Machine-readable registry description: ids, kinds, parameter schemas,
    and docstrings, sorted by id.  This is the blank library shown to the
    language model during translation."""
    out = []
    for fid in sorted(REGISTRY):
        e = REGISTRY[fid]
        out.append(
            {
                "function": e.function_id,
                "kind": e.kind,
                "takes_second_object": e.needs_object2,
                "params": e.schema,
                "doc": e.doc,
            }
        )
    return out


@dataclass
class BoundTerm:
    """A validated (or safely neutralized) constraint call ready for
    evaluation.  Invalid bindings evaluate to a constant 0."""

    call: ConstraintCall
    entry: Optional[RegistryEntry]
    valid: bool
    error: Optional[str] = None
    participants: tuple[int, ...] = dc_field(default_factory=tuple)

    @property
    def field(self) -> bool:
        return bool(self.entry and self.entry.field and self.valid)

    def evaluate(self, ctx: EvalContext) -> float:
        if not self.valid:
            return 0.0
        for idx in self.participants:
            if idx not in ctx.placements:
                return 0.0
        return self.call.weight * self.entry.impl(ctx, self.call)


def bind_call(graph: LayoutGraph, call: ConstraintCall) -> BoundTerm:
    """Validate a constraint call against the registry.

    Unknown function, bad indices, or schema-mismatched parameters produce an
    invalid term that evaluates to 0; the error message feeds diagnostics.
    """
    entry = REGISTRY.get(call.function_id)
    if entry is None:
        return BoundTerm(call, None, False, f"unknown function {call.function_id!r}")
    n = len(graph.objects)
    participants = [call.subject]
    if entry.needs_object2:
        if call.object2 is None:
            return BoundTerm(call, entry, False, f"{call.function_id} needs a second object")
        participants.append(call.object2)
    elif call.object2 is not None:
        return BoundTerm(call, entry, False, f"{call.function_id} takes no second object")
    if call.function_id == "pair_between" and isinstance(call.params.get("other"), int):
        participants.append(call.params["other"])
    for idx in participants:
        if not 0 <= idx < n:
            return BoundTerm(call, entry, False, f"object index {idx} out of range")
    try:
        jsonschema.validate(call.params, entry.schema)
    except jsonschema.ValidationError as exc:
        return BoundTerm(call, entry, False, f"parameter schema mismatch: {exc.message}")
    if not math.isfinite(call.weight) or call.weight < 0:
        return BoundTerm(call, entry, False, "weight must be a nonnegative finite number")
    return BoundTerm(call, entry, True, None, tuple(participants))


def bind_graph(graph: LayoutGraph) -> list[BoundTerm]:
    return [bind_call(graph, c) for c in graph.calls]


def lang_cost(terms: Sequence[BoundTerm], ctx: EvalContext) -> float:
    return sum(t.evaluate(ctx) for t in terms)
