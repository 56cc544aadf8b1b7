"""Elicitation stages: room, zones, objects, styles, constraint sentences,
and constraint cleaning.

Every stage sends one structured-output request, validates the reply against
its schema plus stage-specific semantic checks, and retries with the error
quoted back up to the attempt limit.  Responses carry the raw text so failed
stages can be inspected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import jsonschema

from ..geometry import Point2
from ..scene import (
    LayoutGraph,
    ObjectSpec,
    Opening,
    Room,
    WallPoint,
    Zone,
)
from .providers import ChatRequest, Provider
from .schemas import STAGE_SCHEMAS

MAX_ATTEMPTS = 3
TEMP_ELICIT = 0.2  # stages proposing content
TEMP_EXACT = 0.0  # mechanical transforms: cleaning and translation

SYSTEM_PROMPT = (
    "You are an expert interior designer. Always answer with a single JSON "
    "object exactly matching the requested shape. No prose, no markdown fences."
)


@dataclass(frozen=True)
class BriefRequest:
    prompt: str
    seed: int = 0
    overrides: Optional[Room] = None

    def __post_init__(self):
        if not self.prompt.strip():
            raise ValueError("empty brief prompt")


@dataclass(frozen=True)
class StageResponse:
    stage: str
    raw: str
    parsed: dict
    attempts: int


@dataclass(frozen=True)
class TaggedSentence:
    subject: str
    sentence: str


class StageFailure(RuntimeError):
    """A stage's output never validated within the attempt limit."""

    def __init__(self, stage: str, raw: str, attempts: int, reason: str):
        self.stage = stage
        self.raw = raw
        self.attempts = attempts
        self.reason = reason
        super().__init__(f"stage {stage!r} failed after {attempts} attempts: {reason}")


def extract_json(text: str) -> dict:
    """Parse a JSON object, tolerating markdown code fences."""
    text = text.strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    if text.startswith("```"):
        body = text.split("```")
        if len(body) >= 3:
            inner = body[1]
            if inner.startswith("json"):
                inner = inner[4:]
            return json.loads(inner.strip())
    raise json.JSONDecodeError("not a JSON object", text, 0)


def ask_stage(
    provider: Provider,
    stage: str,
    user_prompt: str,
    temperature: float,
    semantic: Optional[Callable[[dict], None]] = None,
) -> StageResponse:
    """One validated stage round-trip with repair retries.

    A reply failing JSON parsing, schema validation, or the semantic check is
    sent back with the error message for another attempt, up to MAX_ATTEMPTS.
    """
    schema = STAGE_SCHEMAS[stage]
    messages = [
        {"role": "system", "content": SYSTEM_PROMPT},
        {"role": "user", "content": user_prompt},
    ]
    raw = ""
    for attempt in range(1, MAX_ATTEMPTS + 1):
        raw = provider.complete(
            ChatRequest(stage=stage, messages=tuple(messages), temperature=temperature)
        )
        try:
            parsed = extract_json(raw)
            jsonschema.validate(parsed, schema)
            if semantic is not None:
                semantic(parsed)
            return StageResponse(stage=stage, raw=raw, parsed=parsed, attempts=attempt)
        except (json.JSONDecodeError, jsonschema.ValidationError, ValueError) as err:
            reason = str(err).splitlines()[0]
            if attempt == MAX_ATTEMPTS:
                raise StageFailure(stage, raw, attempt, reason)
            messages.append({"role": "assistant", "content": raw})
            messages.append(
                {
                    "role": "user",
                    "content": (
                        f"Your reply was invalid: {reason}. "
                        "Answer again with a single corrected JSON object."
                    ),
                }
            )
    raise StageFailure(stage, raw, MAX_ATTEMPTS, "unreachable")


def _room_context(room: Room) -> str:
    return json.dumps(
        {
            "width": room.width,
            "length": room.length,
            "height": room.height,
            "doors": [
                {"wall": d.wall, "offset": d.offset, "width": d.width} for d in room.doors
            ],
            "windows": [
                {"wall": w.wall, "offset": w.offset, "width": w.width} for w in room.windows
            ],
            "sockets": [{"wall": s.wall, "offset": s.offset} for s in room.sockets],
        },
        sort_keys=True,
    )


def query_room_params(
    provider: Provider,
    brief: BriefRequest,
    diagnostics: Optional[list] = None,
) -> Room:
    """Stage A: room dimensions and fixed features, or the caller's override."""
    if brief.overrides is not None:
        return brief.overrides
    prompt = (
        f"Brief: {brief.prompt}\n\n"
        "Determine the room's dimensions in meters and its fixed features "
        "(doors, windows, electrical sockets). Walls are named south, north, "
        "east, west; the south-west corner is the origin, offsets measure a "
        "feature's center along its wall from the corner with the lower "
        "coordinates. Reply with JSON of the form\n"
        '{"width": m, "length": m, "height": m, '
        '"doors": [{"wall": "south", "offset": m, "width": m}], '
        '"windows": [...], "sockets": [{"wall": "west", "offset": m}]}\n'
        "Height may be omitted (3 m assumed). Invent plausible features when "
        "the brief is silent, but keep them modest."
    )
    resp = ask_stage(provider, "room_params", prompt, TEMP_ELICIT)
    p = resp.parsed
    width, length = float(p["width"]), float(p["length"])
    height = float(p.get("height", 3.0))

    def take_openings(key: str, kind: str) -> tuple[Opening, ...]:
        out = []
        for o in p.get(key, []):
            extent = width if o["wall"] in ("south", "north") else length
            half = o["width"] / 2
            if o["offset"] - half < -1e-9 or o["offset"] + half > extent + 1e-9:
                if diagnostics is not None:
                    diagnostics.append(
                        {
                            "category": "Language",
                            "stage": "room_params",
                            "error": f"{kind} beyond wall extent dropped: {o}",
                        }
                    )
                continue
            out.append(Opening(o["wall"], o["offset"], o["width"], kind))
        return tuple(out)

    sockets = []
    for s in p.get("sockets", []):
        extent = width if s["wall"] in ("south", "north") else length
        if 0 <= s["offset"] <= extent:
            sockets.append(WallPoint(s["wall"], s["offset"]))
        elif diagnostics is not None:
            diagnostics.append(
                {
                    "category": "Language",
                    "stage": "room_params",
                    "error": f"socket beyond wall extent dropped: {s}",
                }
            )
    return Room(
        width=width,
        length=length,
        height=height,
        doors=take_openings("doors", "door"),
        windows=take_openings("windows", "window"),
        sockets=tuple(sockets),
    )


def query_zones(provider: Provider, brief: BriefRequest, room: Room) -> list[Zone]:
    """Stage B: ordered zone labels, most significant first."""

    def semantic(p: dict) -> None:
        labels = [z["label"] for z in p["zones"]]
        if len(set(labels)) != len(labels):
            raise ValueError("zone labels must be distinct")

    prompt = (
        f"Brief: {brief.prompt}\nRoom: {_room_context(room)}\n\n"
        "List the functional zones this room needs, ordered by significance "
        "(most important first, at most 5, distinct labels). Reply with JSON "
        '{"zones": [{"label": "sleeping"}, ...]}'
    )
    resp = ask_stage(provider, "zones", prompt, TEMP_ELICIT, semantic)
    labels = [z["label"] for z in resp.parsed["zones"]]
    # provisional centroids at the room center; the solver re-derives them
    center = Point2(room.width / 2, room.length / 2)
    return [Zone(label, label, center, rank + 1) for rank, label in enumerate(labels)]


def query_primary(
    provider: Provider, brief: BriefRequest, room: Room, zones: Sequence[Zone]
) -> list[ObjectSpec]:
    """Stage C(i): one anchoring primary object per zone."""
    labels = [z.label for z in zones]

    def semantic(p: dict) -> None:
        seen = [o["zone"] for o in p["objects"]]
        if sorted(seen) != sorted(labels):
            raise ValueError(
                f"need exactly one primary object per zone {labels}, got zones {seen}"
            )

    prompt = (
        f"Brief: {brief.prompt}\nRoom: {_room_context(room)}\n"
        f"Zones in rank order: {json.dumps(labels)}\n\n"
        "Name the single most important (primary) object of each zone with "
        "its footprint in meters (width is left-right, length is front-back). "
        'Reply with JSON {"objects": [{"name": "bed", "width": 1.6, '
        '"length": 2.0, "zone": "sleeping"}, ...]}, exactly one object per zone.'
    )
    resp = ask_stage(provider, "primary", prompt, TEMP_ELICIT, semantic)
    by_zone = {z.label: z.id for z in zones}
    return [
        ObjectSpec(
            name=o["name"],
            tier="primary",
            width=float(o["width"]),
            length=float(o["length"]),
            zone_id=by_zone[o["zone"]],
        )
        for o in resp.parsed["objects"]
    ]


def query_secondary(
    provider: Provider,
    brief: BriefRequest,
    room: Room,
    zones: Sequence[Zone],
    primaries: Sequence[ObjectSpec],
    diagnostics: Optional[list] = None,
) -> list[ObjectSpec]:
    """Stage C(ii): floor-standing support objects, multiplicities expanded."""
    labels = [z.label for z in zones]
    prompt = (
        f"Brief: {brief.prompt}\nRoom: {_room_context(room)}\n"
        f"Zones: {json.dumps(labels)}\n"
        f"Primary objects: {json.dumps([o.name for o in primaries])}\n\n"
        "List secondary floor-standing objects that support each zone's "
        "function (wardrobes, nightstands, desks, chairs...). Use count for "
        'multiples. Reply with JSON {"objects": [{"name": "nightstand", '
        '"width": 0.45, "length": 0.45, "zone": "sleeping", "count": 2}, ...]}'
    )
    resp = ask_stage(provider, "secondary", prompt, TEMP_ELICIT)
    by_zone = {z.label: z.id for z in zones}
    out: list[ObjectSpec] = []
    for o in resp.parsed["objects"]:
        if o["zone"] not in by_zone:
            if diagnostics is not None:
                diagnostics.append(
                    {
                        "category": "Language",
                        "stage": "secondary",
                        "error": f"unknown zone {o['zone']!r} for {o['name']!r}, dropped",
                    }
                )
            continue
        count = int(o.get("count", 1))
        for k in range(count):
            name = o["name"] if count == 1 else f"{o['name']} {k + 1}"
            out.append(
                ObjectSpec(
                    name=name,
                    tier="secondary",
                    width=float(o["width"]),
                    length=float(o["length"]),
                    zone_id=by_zone[o["zone"]],
                    count_group=o["name"] if count > 1 else None,
                )
            )
    return out


def query_tertiary(
    provider: Provider,
    brief: BriefRequest,
    room: Room,
    placed_names: Sequence[str],
) -> list[ObjectSpec]:
    """Stage C(iii): attached decor, each with exactly one placement sentence."""
    prompt = (
        f"Brief: {brief.prompt}\nRoom: {_room_context(room)}\n"
        f"Objects so far: {json.dumps(list(placed_names))}\n\n"
        "List tertiary objects: rugs (floor), wall art and mirrors (wall), "
        "ceiling lamps (ceiling), or items resting on furniture (surface). "
        "Give each exactly one short placement constraint sentence. Reply "
        'with JSON {"objects": [{"name": "painting", "width": 0.9, '
        '"length": 0.05, "attach": "wall", "constraint": "hang above the '
        'bed"}, ...]}'
    )
    resp = ask_stage(provider, "tertiary", prompt, TEMP_ELICIT)
    return [
        ObjectSpec(
            name=o["name"],
            tier="tertiary",
            width=float(o["width"]),
            length=float(o["length"]),
            attach=o["attach"],
            raw_constraints=(o["constraint"],),
        )
        for o in resp.parsed["objects"]
    ]


def query_styles(
    provider: Provider,
    brief: BriefRequest,
    objects: Sequence[ObjectSpec],
) -> tuple[str, dict[str, str]]:
    """Stage C(iv): a room style and per-object material/color notes."""
    names = [o.name for o in objects]
    prompt = (
        f"Brief: {brief.prompt}\nObjects: {json.dumps(names)}\n\n"
        "Describe a coherent style: materials, colors, patterns. Reply with "
        'JSON {"room": "...", "objects": [{"name": "...", "style": "..."}]}'
    )
    resp = ask_stage(provider, "styles", prompt, TEMP_ELICIT)
    styles = {o["name"]: o["style"] for o in resp.parsed["objects"]}
    return resp.parsed["room"], styles


def _constraint_query(
    provider: Provider,
    stage: str,
    brief: BriefRequest,
    room: Room,
    objects: Sequence[ObjectSpec],
    instruction: str,
) -> list[TaggedSentence]:
    listing = json.dumps(
        [
            {"name": o.name, "tier": o.tier, "width": o.width, "length": o.length}
            for o in objects
        ],
        sort_keys=True,
    )
    prompt = (
        f"Brief: {brief.prompt}\nRoom: {_room_context(room)}\n"
        f"Objects: {listing}\n\n{instruction}\n"
        'Reply with JSON {"constraints": [{"subject": "object name", '
        '"sentence": "..."}]}'
    )
    resp = ask_stage(provider, stage, prompt, TEMP_ELICIT)
    return [
        TaggedSentence(c["subject"], c["sentence"]) for c in resp.parsed["constraints"]
    ]


def query_intra_constraints(
    provider: Provider,
    brief: BriefRequest,
    room: Room,
    objects: Sequence[ObjectSpec],
) -> list[TaggedSentence]:
    """Stage D(i): per-object placement requirements relative to the room."""
    return _constraint_query(
        provider,
        "intra",
        brief,
        room,
        objects,
        "For each object give placement constraints that involve only that "
        "object and the room's fixed features (walls, doors, windows, "
        "sockets): wall contact, clearance, accessibility, facing, keeping "
        "openings free.",
    )


def query_inter_constraints(
    provider: Provider,
    brief: BriefRequest,
    room: Room,
    objects: Sequence[ObjectSpec],
) -> list[TaggedSentence]:
    """Stage D(ii): pairwise relations between objects."""
    return _constraint_query(
        provider,
        "inter",
        brief,
        room,
        objects,
        "Give pairwise placement relations between objects (next to, facing, "
        "near, far from, aligned with, between). The subject is the object "
        "being placed; name the other object inside the sentence.",
    )


def clean_constraints(
    provider: Provider,
    sentences: Sequence[TaggedSentence],
    diagnostics: Optional[list] = None,
) -> list[TaggedSentence]:
    """Stage D(iii): merge similar constraints, drop duplicates, split
    compound sentences into atomic ones.

    Tertiary constraints never pass through here.  If the stage fails the raw
    sentences pass through unchanged with a warning diagnostic.
    """
    if not sentences:
        return []
    listing = json.dumps(
        [{"subject": s.subject, "sentence": s.sentence} for s in sentences]
    )
    prompt = (
        f"Constraint sentences: {listing}\n\n"
        "Clean this list: merge near-duplicates, remove exact duplicates, and "
        "split any sentence containing several requirements into separate "
        "atomic sentences (for example a sentence asking not to block "
        "windows or doors becomes one sentence about windows and one about "
        "doors). Keep subjects unchanged; do not invent new constraints. "
        'Reply with JSON {"constraints": [{"subject": "...", "sentence": "..."}]}'
    )
    try:
        resp = ask_stage(provider, "clean", prompt, TEMP_EXACT)
    except StageFailure as err:
        if diagnostics is not None:
            diagnostics.append(
                {
                    "category": "Cleaning",
                    "stage": "clean",
                    "error": f"cleaning failed, passing raw constraints through: {err.reason}",
                }
            )
        return list(sentences)
    return [
        TaggedSentence(c["subject"], c["sentence"]) for c in resp.parsed["constraints"]
    ]


@dataclass
class ElicitResult:
    graph: LayoutGraph
    room_style: str
    styles: dict[str, str]
    diagnostics: list = field(default_factory=list)
    cleaned_intra: list = field(default_factory=list)
    cleaned_inter: list = field(default_factory=list)


def elicit_graph(
    provider: Provider,
    brief: BriefRequest,
    clean: bool = True,
) -> ElicitResult:
    """Run the full language phase and assemble the layout constraint graph.

    With clean=False the constraint-cleaning pass is skipped (ablation).
    """
    from .translate import translate

    diagnostics: list = []
    room = query_room_params(provider, brief, diagnostics)
    zones = query_zones(provider, brief, room)
    primaries = query_primary(provider, brief, room, zones)
    secondaries = query_secondary(provider, brief, room, zones, primaries, diagnostics)
    floor_names = [o.name for o in primaries + secondaries]
    tertiaries = query_tertiary(provider, brief, room, floor_names)
    objects = list(primaries) + list(secondaries) + list(tertiaries)

    room_style, styles = query_styles(provider, brief, objects)
    objects = [
        spec if spec.name not in styles else _with_style(spec, styles[spec.name])
        for spec in objects
    ]

    placeable = objects[: len(primaries) + len(secondaries)]
    intra = query_intra_constraints(provider, brief, room, placeable)
    inter = query_inter_constraints(provider, brief, room, placeable)

    by_name: dict[str, int] = {}
    for i, o in enumerate(objects):
        by_name.setdefault(o.name, i)
    objects = _attach_raw(objects, by_name, intra + inter, diagnostics)

    if clean:
        cleaned_intra = clean_constraints(provider, intra, diagnostics)
        cleaned_inter = clean_constraints(provider, inter, diagnostics)
    else:
        cleaned_intra, cleaned_inter = list(intra), list(inter)

    calls = []
    calls += translate(provider, cleaned_intra, objects, "intra", diagnostics)
    calls += translate(provider, cleaned_inter, objects, "inter", diagnostics)
    ter_sentences = [
        TaggedSentence(o.name, o.raw_constraints[0])
        for o in tertiaries
        if o.raw_constraints
    ]
    calls += translate(provider, ter_sentences, objects, "tertiary", diagnostics)

    graph = LayoutGraph(room, tuple(objects), tuple(calls), tuple(zones))
    return ElicitResult(
        graph=graph,
        room_style=room_style,
        styles=styles,
        diagnostics=diagnostics,
        cleaned_intra=cleaned_intra,
        cleaned_inter=cleaned_inter,
    )


def _with_style(spec: ObjectSpec, style: str) -> ObjectSpec:
    return ObjectSpec(
        name=spec.name,
        tier=spec.tier,
        width=spec.width,
        length=spec.length,
        zone_id=spec.zone_id,
        style=style,
        attach=spec.attach,
        count_group=spec.count_group,
        raw_constraints=spec.raw_constraints,
    )


def _attach_raw(
    objects: list[ObjectSpec],
    by_name: dict[str, int],
    sentences: Sequence[TaggedSentence],
    diagnostics: list,
) -> list[ObjectSpec]:
    extra: dict[int, list[str]] = {}
    for s in sentences:
        idx = by_name.get(s.subject)
        if idx is None:
            diagnostics.append(
                {
                    "category": "Language",
                    "stage": "constraints",
                    "error": f"constraint subject {s.subject!r} unknown, sentence kept out of graph",
                }
            )
            continue
        # tertiary objects carry exactly their one elicited constraint
        if objects[idx].tier == "tertiary":
            diagnostics.append(
                {
                    "category": "Language",
                    "stage": "constraints",
                    "error": f"intra/inter constraint on tertiary {s.subject!r} ignored",
                }
            )
            continue
        extra.setdefault(idx, []).append(s.sentence)
    out = []
    for i, spec in enumerate(objects):
        if i in extra:
            out.append(
                ObjectSpec(
                    name=spec.name,
                    tier=spec.tier,
                    width=spec.width,
                    length=spec.length,
                    zone_id=spec.zone_id,
                    style=spec.style,
                    attach=spec.attach,
                    count_group=spec.count_group,
                    raw_constraints=spec.raw_constraints + tuple(extra[i]),
                )
            )
        else:
            out.append(spec)
    return out
