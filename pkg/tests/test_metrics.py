import math
import random

import numpy as np
import pytest
from shapely.geometry import Polygon as ShapelyPolygon, box as shapely_aabox

from roomlayout.geometry import OrientedBox, Point2, box_polygon, obb_corners
from roomlayout.metrics import (
    MetricsReport,
    compute_metrics,
    intrusion_depth,
    oob,
    oor,
    pathway_cost,
    pathway_points,
)
from roomlayout.scene import (
    LayoutGraph,
    ObjectSpec,
    Opening,
    Placement,
    Room,
    Zone,
    door_swing_polygon,
)


def plain_room(width=4.0, length=5.0, doors=()) -> Room:
    return Room(width=width, length=length, doors=tuple(doors))


def graph_of(room: Room, specs) -> LayoutGraph:
    zones = tuple(
        Zone(s.zone_id, s.zone_id, Point2(room.width / 2, room.length / 2), k + 1)
        for k, s in enumerate(specs)
        if s.tier == "primary" and s.zone_id
    )
    return LayoutGraph(room, tuple(specs), (), zones)


def shapely_obb(box: OrientedBox) -> ShapelyPolygon:
    return ShapelyPolygon([(c.x, c.y) for c in obb_corners(box)])


class TestIntrusionDepth:
    def test_outside_is_zero(self):
        box = OrientedBox(Point2(2.0, 2.0), 1.0, 1.0, 0.0)
        assert intrusion_depth(Point2(3.1, 2.0), box) == 0.0

    def test_center_of_axis_aligned_box(self):
        box = OrientedBox(Point2(2.0, 2.0), 1.0, 2.0, 0.0)
        assert math.isclose(intrusion_depth(Point2(2.0, 2.0), box), 0.5)

    def test_near_edge(self):
        box = OrientedBox(Point2(2.0, 2.0), 1.0, 2.0, 0.0)
        assert math.isclose(intrusion_depth(Point2(2.4, 2.0), box), 0.1, abs_tol=1e-12)

    def test_rotation_invariant(self):
        # same relative offset, box turned a quarter turn
        a = OrientedBox(Point2(0.0, 0.0), 1.0, 2.0, 0.0)
        b = OrientedBox(Point2(0.0, 0.0), 1.0, 2.0, math.pi / 2)
        assert math.isclose(intrusion_depth(Point2(0.2, 0.0), a), intrusion_depth(Point2(0.0, 0.2), b), abs_tol=1e-12)


class TestPathway:
    def test_empty_room_zero(self):
        room = plain_room()
        assert pathway_cost(room, []) == 0.0

    def test_flush_furniture_clears_pathway(self):
        # hugging the walls of a large room leaves the corridor untouched
        room = plain_room(6.0, 6.0)
        boxes = [
            OrientedBox(Point2(0.3, 3.0), 0.6, 2.0, math.pi / 2),
            OrientedBox(Point2(5.7, 3.0), 0.6, 2.0, math.pi / 2),
        ]
        pts = pathway_points(room)
        # no corridor point should fall deeper than one grid cell into these
        worst = max((intrusion_depth(p, b) for b in boxes for p in pts), default=0.0)
        assert worst <= 0.05 + 1e-9
        assert pathway_cost(room, boxes) <= len(pts) * (0.05 + 1e-9) ** 2

    def test_center_straddling_object_positive(self):
        room = plain_room()
        box = OrientedBox(Point2(2.0, 2.5), 1.2, 1.2, 0.0)
        pts = pathway_points(room)
        assert any(intrusion_depth(p, box) > 0 for p in pts)
        assert pathway_cost(room, [box]) > 0.0

    def test_matches_bruteforce_sum(self):
        room = plain_room()
        box = OrientedBox(Point2(2.0, 2.5), 1.5, 1.5, 0.3)
        pts = pathway_points(room)
        expect = sum(intrusion_depth(p, box) ** 2 for p in pts)
        assert math.isclose(pathway_cost(room, [box], points=pts), expect, rel_tol=1e-12)

    def test_additive_over_disjoint_boxes(self):
        room = plain_room()
        a = OrientedBox(Point2(1.0, 2.5), 0.8, 0.8, 0.0)
        b = OrientedBox(Point2(3.0, 2.5), 0.8, 0.8, 0.0)
        pts = pathway_points(room)
        total = pathway_cost(room, [a, b], points=pts)
        parts = pathway_cost(room, [a], points=pts) + pathway_cost(room, [b], points=pts)
        assert math.isclose(total, parts, rel_tol=1e-12)


class TestOor:
    def test_disjoint_zero(self):
        room = plain_room()
        specs = [
            ObjectSpec("a", "primary", 1.0, 1.0, zone_id="za"),
            ObjectSpec("b", "primary", 1.0, 1.0, zone_id="zb"),
        ]
        graph = graph_of(room, specs)
        placements = {0: Placement(1.0, 1.0, 0.0), 1: Placement(3.0, 4.0, 0.0)}
        assert oor(graph, placements) == 0.0

    def test_half_square_meter_in_twenty(self):
        room = plain_room()  # 4 x 5 = 20 m^2
        specs = [
            ObjectSpec("a", "primary", 1.0, 1.0, zone_id="za"),
            ObjectSpec("b", "primary", 1.0, 1.0, zone_id="zb"),
        ]
        graph = graph_of(room, specs)
        # shifted 0.5 m apart horizontally: shared strip 0.5 x 1.0
        placements = {0: Placement(2.0, 2.5, 0.0), 1: Placement(2.5, 2.5, 0.0)}
        assert math.isclose(oor(graph, placements), 0.025, abs_tol=1e-12)

    def test_mixed_tertiary_types_free(self):
        room = plain_room()
        specs = [
            ObjectSpec("rug", "tertiary", 2.0, 1.5, attach="floor"),
            ObjectSpec("painting", "tertiary", 1.0, 0.05, attach="wall"),
        ]
        graph = graph_of(room, specs)
        placements = {0: Placement(2.0, 2.5, 0.0), 1: Placement(2.0, 2.5, 0.0)}
        assert oor(graph, placements) == 0.0

    def test_same_tertiary_type_counts(self):
        room = plain_room()
        specs = [
            ObjectSpec("rug", "tertiary", 2.0, 2.0, attach="floor"),
            ObjectSpec("mat", "tertiary", 2.0, 2.0, attach="floor"),
        ]
        graph = graph_of(room, specs)
        placements = {0: Placement(2.0, 2.5, 0.0), 1: Placement(3.0, 2.5, 0.0)}
        # 1 x 2 shared strip over 20 m^2
        assert math.isclose(oor(graph, placements), 0.1, abs_tol=1e-12)

    def test_floor_vs_tertiary_ignored(self):
        room = plain_room()
        specs = [
            ObjectSpec("bed", "primary", 1.6, 2.0, zone_id="z"),
            ObjectSpec("rug", "tertiary", 2.0, 1.5, attach="floor"),
        ]
        graph = graph_of(room, specs)
        placements = {0: Placement(2.0, 2.5, 0.0), 1: Placement(2.0, 2.5, 0.0)}
        assert oor(graph, placements) == 0.0

    def test_door_swing_counts(self):
        room = plain_room(doors=[Opening("south", 0.8, 0.9, "door")])
        specs = [ObjectSpec("chest", "secondary", 1.0, 1.0, zone_id="z")]
        graph = graph_of(room, specs)
        placements = {0: Placement(0.8, 0.3, 0.0)}
        swing = door_swing_polygon(room, room.doors[0])
        expect = shapely_obb(placements[0].box(specs[0])).intersection(
            ShapelyPolygon(swing.vertices)
        ).area
        assert expect > 0.01
        assert math.isclose(oor(graph, placements), expect / room.area, rel_tol=1e-9)

    def test_relabeling_invariant(self):
        room = plain_room()
        specs = [
            ObjectSpec("a", "primary", 1.2, 1.0, zone_id="za"),
            ObjectSpec("b", "primary", 1.0, 1.4, zone_id="zb"),
            ObjectSpec("c", "secondary", 0.8, 0.8, zone_id="za"),
        ]
        placements = {
            0: Placement(2.0, 2.5, 0.2),
            1: Placement(2.4, 2.7, -0.4),
            2: Placement(2.2, 2.2, 1.0),
        }
        graph = graph_of(room, specs)
        base_oor = oor(graph, placements)
        base_oob = oob(graph, placements)
        perm = [2, 0, 1]
        graph_p = graph_of(room, [specs[i] for i in perm])
        placements_p = {k: placements[i] for k, i in enumerate(perm)}
        assert math.isclose(oor(graph_p, placements_p), base_oor, rel_tol=1e-12)
        assert math.isclose(oob(graph_p, placements_p), base_oob, rel_tol=1e-12)


class TestOob:
    def room_graph_one(self, w=1.0, l=1.0):
        room = plain_room()
        graph = graph_of(room, [ObjectSpec("a", "primary", w, l, zone_id="z")])
        return room, graph

    def test_inside_zero(self):
        _, graph = self.room_graph_one()
        assert oob(graph, {0: Placement(2.0, 2.5, 0.3)}) == 0.0

    def test_half_out(self):
        _, graph = self.room_graph_one()
        assert math.isclose(oob(graph, {0: Placement(0.0, 2.5, 0.0)}), 0.025, abs_tol=1e-12)

    def test_fully_out(self):
        _, graph = self.room_graph_one()
        assert math.isclose(oob(graph, {0: Placement(-3.0, 2.5, 0.0)}), 1.0 / 20.0, abs_tol=1e-12)

    def test_matches_shapely(self):
        room = plain_room()
        rng = random.Random(5)
        room_poly = shapely_aabox(0, 0, 4, 5)
        graph = graph_of(room, [ObjectSpec("a", "primary", 1.3, 0.7, zone_id="z")])
        for _ in range(50):
            p = Placement(rng.uniform(-2, 6), rng.uniform(-2, 7), rng.uniform(-math.pi, math.pi))
            got = oob(graph, {0: p})
            poly = shapely_obb(p.box(graph.objects[0]))
            expect = (poly.area - poly.intersection(room_poly).area) / 20.0
            assert math.isclose(got, expect, abs_tol=1e-9)

    def test_monotone_under_outward_translation(self):
        room = plain_room()
        graph = graph_of(room, [ObjectSpec("a", "primary", 1.0, 1.0, zone_id="z")])
        prev = -1.0
        for t in np.linspace(0.0, 4.0, 60):
            # ray from room center heading past the east wall
            p = Placement(2.0 + t, 2.5 + 0.3 * t, 0.4)
            cur = oob(graph, {0: p})
            assert cur >= prev - 1e-12
            prev = cur


class TestMonteCarlo:
    def test_overlap_area_against_sampling(self):
        rng = np.random.default_rng(17)
        room = plain_room()
        specs = [
            ObjectSpec("a", "primary", 1.4, 1.0, zone_id="za"),
            ObjectSpec("b", "primary", 1.1, 1.6, zone_id="zb"),
        ]
        graph = graph_of(room, specs)
        placements = {
            0: Placement(2.0, 2.5, 0.3),
            1: Placement(2.3, 2.8, -0.7),
        }
        exact = oor(graph, placements) * room.area
        boxes = [placements[i].box(specs[i]) for i in (0, 1)]
        # sample within the first box, test membership in the second
        n = 400_000
        u = rng.uniform(-0.7, 0.7, n)
        v = rng.uniform(-0.5, 0.5, n)
        c, s = math.cos(boxes[0].theta), math.sin(boxes[0].theta)
        xs = boxes[0].center.x + c * u + s * v
        ys = boxes[0].center.y - s * u + c * v
        c2, s2 = math.cos(boxes[1].theta), math.sin(boxes[1].theta)
        dx, dy = xs - boxes[1].center.x, ys - boxes[1].center.y
        lu = c2 * dx - s2 * dy
        lv = s2 * dx + c2 * dy
        inside = (np.abs(lu) <= 0.55) & (np.abs(lv) <= 0.8)
        mc = inside.mean() * boxes[0].area
        assert exact > 0.05
        assert abs(mc - exact) / exact < 0.02

    def test_oob_against_sampling(self):
        rng = np.random.default_rng(23)
        room = plain_room()
        graph = graph_of(room, [ObjectSpec("a", "primary", 1.8, 1.2, zone_id="z")])
        p = Placement(3.7, 4.8, 0.5)
        exact = oob(graph, {0: p}) * room.area
        box = p.box(graph.objects[0])
        n = 400_000
        u = rng.uniform(-0.9, 0.9, n)
        v = rng.uniform(-0.6, 0.6, n)
        c, s = math.cos(box.theta), math.sin(box.theta)
        xs = box.center.x + c * u + s * v
        ys = box.center.y - s * u + c * v
        outside = (xs < 0) | (xs > 4) | (ys < 0) | (ys > 5)
        mc = outside.mean() * box.area
        assert exact > 0.05
        assert abs(mc - exact) / exact < 0.02


class TestReport:
    def setup_graph(self):
        room = plain_room(doors=[Opening("south", 0.8, 0.9, "door")])
        specs = [
            ObjectSpec("bed", "primary", 1.6, 2.0, zone_id="sleeping"),
            ObjectSpec("stand", "secondary", 0.45, 0.45, zone_id="sleeping"),
            ObjectSpec("rug", "tertiary", 2.0, 1.5, attach="floor"),
        ]
        return graph_of(room, specs)

    def test_fields_and_consistency(self):
        graph = self.setup_graph()
        placements = {
            0: Placement(1.0, 3.5, math.pi / 2),
            1: Placement(2.2, 4.6, 0.0),
            2: Placement(2.0, 2.5, 0.0),
        }
        report = compute_metrics(graph, placements)
        assert report.oor_fraction >= 0.0
        assert report.oob_fraction >= 0.0
        assert math.isclose(report.oor_fraction, oor(graph, placements), rel_tol=1e-12)
        assert math.isclose(report.oob_fraction, oob(graph, placements), rel_tol=1e-12)
        assert report.pathway_point_count == len(pathway_points(graph.room))
        assert len(report.per_object) == 3
        assert math.isclose(report.oor_percent, 100 * report.oor_fraction)
        total_path = sum(m.pathway_cost for m in report.per_object)
        assert math.isclose(total_path, report.pathway_cost, rel_tol=1e-12)
        # tertiary rug contributes no pathway cost
        assert report.per_object[2].pathway_cost == 0.0

    def test_partial_placements_allowed(self):
        graph = self.setup_graph()
        report = compute_metrics(graph, {0: Placement(1.0, 3.5, 0.0)})
        assert len(report.per_object) == 1
        assert report.per_object[0].name == "bed"

    def test_serialization(self):
        graph = self.setup_graph()
        report = compute_metrics(graph, {0: Placement(1.0, 3.5, 0.0)})
        d = report.to_dict()
        assert set(d) == {
            "pathway_cost",
            "oor_fraction",
            "oob_fraction",
            "oor_percent",
            "oob_percent",
            "pathway_point_count",
            "per_object",
        }
        text = report.table()
        assert "overlap rate" in text
        assert "bed" in text

    def test_empty_placements(self):
        graph = self.setup_graph()
        report = compute_metrics(graph, {})
        assert report.pathway_cost == 0.0
        assert report.oor_fraction == 0.0
        assert report.oob_fraction == 0.0
