"""Pure 2D geometric kernel: oriented boxes, convex clipping, distances, Voronoi
assignment, and grid medial-axis extraction.

Conventions used throughout the package:

* The room rectangle has its southwest corner at the origin; x spans the room
  width eastward, y spans the room length northward.  Walls are named south
  (y=0), north (y=length), west (x=0), east (x=width).
* Orientations follow a compass convention: theta=0 means the object's front
  faces +y (north) and positive theta turns the front toward +x (east), so the
  facing vector is (sin theta, cos theta).  Stored angles are normalized to
  [-pi, pi).

All functions here are pure and operate on immutable inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi

# Signed areas below this are treated as degenerate (point/segment overlap).
DEGENERATE_AREA = 1e-12


class InvalidZoningError(ValueError):
    """Raised when a Voronoi assignment is requested with no centroids."""


def normalize_angle(theta: float) -> float:
    """Wrap an angle to [-pi, pi)."""
    t = math.fmod(theta + math.pi, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    return t - math.pi


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __iter__(self):
        yield self.x
        yield self.y


@dataclass(frozen=True)
class OrientedBox:
    """A rectangle with center, width (left-right extent), length (front-back
    extent) and compass orientation theta (theta=0 faces +y, positive theta
    turns toward +x)."""

    center: Point2
    width: float
    length: float
    theta: float

    def __post_init__(self):
        if self.width <= 0 or self.length <= 0:
            raise ValueError(f"non-positive box dimensions {self.width}x{self.length}")
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    @property
    def area(self) -> float:
        return self.width * self.length


class ConvexPolygon:
    """An ordered, counterclockwise vertex list.  Degenerate results of clipping
    (empty set, point, segment) are representable and flagged rather than
    raising."""

    __slots__ = ("vertices",)

    def __init__(self, vertices: Iterable[tuple[float, float]]):
        self.vertices: tuple[tuple[float, float], ...] = _canonicalize(vertices)

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    @property
    def is_degenerate(self) -> bool:
        return len(self.vertices) < 3 or abs(_signed_area(self.vertices)) <= DEGENERATE_AREA

    @property
    def area(self) -> float:
        if len(self.vertices) < 3:
            return 0.0
        return abs(_signed_area(self.vertices))

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"ConvexPolygon({list(self.vertices)!r})"


def _signed_area(verts: Sequence[tuple[float, float]]) -> float:
    a = 0.0
    n = len(verts)
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        a += x0 * y1 - x1 * y0
    return 0.5 * a


def _canonicalize(vertices: Iterable[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    """Drop consecutive duplicate vertices and enforce counterclockwise order."""
    verts = [(float(x), float(y)) for x, y in vertices]
    out: list[tuple[float, float]] = []
    for v in verts:
        if not out or math.hypot(v[0] - out[-1][0], v[1] - out[-1][1]) > 1e-12:
            out.append(v)
    if len(out) > 1 and math.hypot(out[0][0] - out[-1][0], out[0][1] - out[-1][1]) <= 1e-12:
        out.pop()
    if len(out) >= 3 and _signed_area(out) < 0.0:
        out.reverse()
    return tuple(out)


def facing_vector(theta: float) -> tuple[float, float]:
    """Unit front direction of an object at the given orientation."""
    return (math.sin(theta), math.cos(theta))


def obb_corners(box: OrientedBox) -> tuple[Point2, Point2, Point2, Point2]:
    """Corners of an oriented box in counterclockwise order, starting from the
    back-left corner in the object frame."""
    c, s = math.cos(box.theta), math.sin(box.theta)
    hw, hl = 0.5 * box.width, 0.5 * box.length
    cx, cy = box.center.x, box.center.y
    local = ((-hw, -hl), (hw, -hl), (hw, hl), (-hw, hl))
    return tuple(Point2(cx + c * lx + s * ly, cy - s * lx + c * ly) for lx, ly in local)


def box_polygon(box: OrientedBox) -> ConvexPolygon:
    return ConvexPolygon((p.x, p.y) for p in obb_corners(box))


def world_to_local(box: OrientedBox, x: float, y: float) -> tuple[float, float]:
    """Express a world point in the box frame (left-right, back-front)."""
    c, s = math.cos(box.theta), math.sin(box.theta)
    dx, dy = x - box.center.x, y - box.center.y
    return (c * dx - s * dy, s * dx + c * dy)


def dist_point_box(p: Point2, box: OrientedBox) -> float:
    """Euclidean distance from a point to the box footprint (0 inside)."""
    u, v = world_to_local(box, p.x, p.y)
    du = max(abs(u) - 0.5 * box.width, 0.0)
    dv = max(abs(v) - 0.5 * box.length, 0.0)
    return math.hypot(du, dv)


def convex_clip(a: ConvexPolygon, b: ConvexPolygon) -> ConvexPolygon:
    """Intersection of two convex polygons by successive half-plane clipping.

    Degenerate overlap (shared edge or corner, disjoint input) yields an empty
    or degenerate polygon, never an error.
    """
    if a.is_empty or b.is_empty or len(b) < 3:
        return ConvexPolygon(())
    output = list(a.vertices)
    clip = b.vertices
    n = len(clip)
    for i in range(n):
        if not output:
            return ConvexPolygon(())
        cx0, cy0 = clip[i]
        cx1, cy1 = clip[(i + 1) % n]
        ex, ey = cx1 - cx0, cy1 - cy0
        current = output
        output = []
        sx, sy = current[-1]
        # inside = left of the counterclockwise clip edge
        s_in = ex * (sy - cy0) - ey * (sx - cx0) >= -1e-12
        for px, py in current:
            p_in = ex * (py - cy0) - ey * (px - cx0) >= -1e-12
            if p_in:
                if not s_in:
                    output.append(_line_intersect(sx, sy, px, py, cx0, cy0, cx1, cy1))
                output.append((px, py))
            elif s_in:
                output.append(_line_intersect(sx, sy, px, py, cx0, cy0, cx1, cy1))
            sx, sy, s_in = px, py, p_in
    return ConvexPolygon(output)


def _line_intersect(ax, ay, bx, by, cx, cy, dx, dy) -> tuple[float, float]:
    """Intersection of segment a-b with the infinite line through c-d."""
    r_x, r_y = bx - ax, by - ay
    s_x, s_y = dx - cx, dy - cy
    denom = r_x * s_y - r_y * s_x
    if abs(denom) < 1e-15:
        return (bx, by)
    t = ((cx - ax) * s_y - (cy - ay) * s_x) / denom
    return (ax + t * r_x, ay + t * r_y)


def side_cost(poly: ConvexPolygon) -> float:
    """Sum of squared edge lengths; 0 for empty, point, or segment polygons.

    Zero-area intersections (objects merely touching) must not be penalized,
    hence the degenerate convention.
    """
    if poly.is_degenerate:
        return 0.0
    verts = poly.vertices
    n = len(verts)
    total = 0.0
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        total += (x1 - x0) ** 2 + (y1 - y0) ** 2
    return total


def overlap_cost(box_a: OrientedBox, box_b: OrientedBox) -> float:
    """side_cost of the intersection of two oriented boxes."""
    return side_cost(convex_clip(box_polygon(box_a), box_polygon(box_b)))


def overlap_area(box_a: OrientedBox, box_b: OrientedBox) -> float:
    return convex_clip(box_polygon(box_a), box_polygon(box_b)).area


def dist_point_boundary(p: Point2, width: float, length: float) -> float:
    """Euclidean distance from a point to the boundary of the room rectangle
    [0, width] x [0, length].  Zero on the boundary; positive inside and out."""
    cx = min(max(p.x, 0.0), width)
    cy = min(max(p.y, 0.0), length)
    if cx != p.x or cy != p.y:
        return math.hypot(p.x - cx, p.y - cy)
    return min(p.x, width - p.x, p.y, length - p.y)


def point_inside_room(p: Point2, width: float, length: float) -> bool:
    return 0.0 <= p.x <= width and 0.0 <= p.y <= length


def voronoi_assign(p: Point2, centroids: Sequence[Point2]) -> int:
    """Index of the nearest centroid; ties break toward the lowest index."""
    if not centroids:
        raise InvalidZoningError("voronoi assignment requires at least one centroid")
    best = 0
    best_d = (p.x - centroids[0].x) ** 2 + (p.y - centroids[0].y) ** 2
    for i in range(1, len(centroids)):
        d = (p.x - centroids[i].x) ** 2 + (p.y - centroids[i].y) ** 2
        if d < best_d:
            best, best_d = i, d
    return best


def _free_mask(width: float, length: float, obstacles: Sequence[OrientedBox], cell: float):
    """Boolean grid over the room, True where no obstacle covers the cell center."""
    nx = max(int(round(width / cell)), 1)
    ny = max(int(round(length / cell)), 1)
    xs = (np.arange(nx) + 0.5) * cell
    ys = (np.arange(ny) + 0.5) * cell
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    free = np.ones((nx, ny), dtype=bool)
    for box in obstacles:
        c, s = math.cos(box.theta), math.sin(box.theta)
        dx = gx - box.center.x
        dy = gy - box.center.y
        u = c * dx - s * dy
        v = s * dx + c * dy
        inside = (np.abs(u) <= 0.5 * box.width) & (np.abs(v) <= 0.5 * box.length)
        free &= ~inside
    return free, xs, ys


def _skeleton_and_clearance(
    width: float,
    length: float,
    obstacles: Sequence[OrientedBox],
    cell: float,
):
    """Distance-transform skeleton of the free space on a regular grid.

    Returns (skeleton mask, clearance in meters, xs, ys) where clearance is the
    distance-transform value of each free cell (distance to the nearest wall or
    obstacle, measured cell-center to cell-center).  The skeleton contains the
    ridge cells of that transform.
    """
    from skimage.morphology import medial_axis as _skimage_medial_axis

    free, xs, ys = _free_mask(width, length, obstacles, cell)
    if not free.any():
        empty = np.zeros_like(free)
        return empty, np.zeros(free.shape), xs, ys
    padded = np.pad(free, 1, constant_values=False)
    # the thinning pass breaks ties randomly unless the rng is pinned; output
    # must be reproducible byte for byte
    skel, dist = _skimage_medial_axis(padded, return_distance=True, rng=0)
    skel = skel[1:-1, 1:-1]
    clearance = dist[1:-1, 1:-1] * cell
    return skel, clearance, xs, ys


def medial_axis(
    width: float,
    length: float,
    obstacles: Sequence[OrientedBox],
    cell: float,
    half_width: float = 0.3,
) -> list[Point2]:
    """Grid-sampled pathway point set: the free-space skeleton dilated to the
    full 2 * half_width pathway width.

    Ridge cells too close to a wall or obstacle to anchor the pathway are
    pruned before dilation, and the dilated set is again restricted to cells
    with sufficient clearance, so every returned point keeps at least
    half_width from walls and obstacles up to one grid cell of slack.  A fully
    obstructed room yields an empty list.
    """
    from scipy.ndimage import binary_dilation

    if cell <= 0:
        raise ValueError("cell size must be positive")
    skel, clearance, xs, ys = _skeleton_and_clearance(width, length, obstacles, cell)
    # grid clearance can overshoot the true distance by up to a cell diagonal
    # when obstacle edges are rotated; tighten so true clearance stays within
    # one cell of half_width
    floor = half_width + (math.sqrt(2.0) - 1.0) * cell
    spine = skel & (clearance >= floor)
    if not spine.any():
        return []
    r = int(math.ceil(half_width / cell))
    yy, xx = np.ogrid[-r : r + 1, -r : r + 1]
    disk = (xx * xx + yy * yy) * cell * cell <= half_width * half_width + 1e-12
    keep = binary_dilation(spine, structure=disk) & (clearance >= floor)
    ii, jj = np.nonzero(keep)
    return [Point2(float(xs[i]), float(ys[j])) for i, j in zip(ii, jj)]
