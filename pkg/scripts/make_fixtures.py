#!/usr/bin/env python3
"""Build the canned language transcripts under fixtures/.

Each fixture is produced by running the real language phase against scripted
stage responses and recording every request/response pair.  Replaying later
hits identical request hashes, so `roomlayout generate --fixtures ...` is
fully deterministic and needs no API key.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from roomlayout.llmio import (
    BriefRequest,
    CannedProvider,
    RecordingProvider,
    TranscriptStore,
    elicit_graph,
)
from roomlayout.scene import validate_graph

ROOT = Path(__file__).resolve().parent.parent
J = json.dumps

BEDROOM_PROMPT = "A bedroom that is 4m x 5m"
VAMPIRE_PROMPT = "A windowless bedroom for a vampire, 3.5m x 4.5m"


def bedroom_4x5() -> dict[str, list[str]]:
    """Three-zone bedroom: 3 primary, 4 secondary, 3 tertiary objects."""
    room = {
        "width": 4.0,
        "length": 5.0,
        "height": 3.0,
        "doors": [{"wall": "south", "offset": 0.8, "width": 0.9}],
        "windows": [{"wall": "north", "offset": 2.2, "width": 1.2}],
        "sockets": [
            {"wall": "west", "offset": 1.0},
            {"wall": "east", "offset": 2.0},
        ],
    }
    intra = [
        ("bed", "the bed should not block windows or doors"),
        ("bed", "place the bed with its headboard against a wall"),
        ("bed", "the bed must face into the room"),
        ("bed", "keep the bed well away from any electrical socket"),
        ("wardrobe", "the wardrobe must stand against a wall"),
        ("wardrobe", "keep the front of the wardrobe accessible"),
        ("wardrobe", "the wardrobe must face into the room"),
        ("wardrobe", "the wardrobe should not block the door"),
        ("dresser", "place the dresser close to the window for natural light"),
        ("dresser", "the dresser should not block the door"),
        ("dresser", "put the dresser against a wall"),
    ]
    # cleaning splits the compound window/door sentence, keeps the rest
    cleaned_intra = [(intra[0][0], "the bed should not block windows"),
                     (intra[0][0], "the bed should not block doors")] + intra[1:]
    inter = [
        ("nightstand 1", "place nightstand 1 at the left side of the bed"),
        ("nightstand 2", "place nightstand 2 at the right side of the bed"),
        ("nightstand 2", "keep the nightstands aligned with each other"),
        ("chair", "keep the chair near the dresser"),
        ("bench", "keep the bench near the wardrobe"),
    ]
    call = lambda k, fn, obj2=None, **params: {
        "sentence": k, "function": fn, "object2": obj2, "params": params,
    }
    intra_calls = [
        call(0, "ind_not_block", fixed_object_type="window"),
        call(1, "ind_not_block", fixed_object_type="door"),
        call(2, "ind_next_to_wall"),
        call(3, "ind_face_into_room"),
        call(4, "ind_away_from_fixed_object", fixed_object_type="socket", min_dist=1.8),
        call(5, "ind_next_to_wall"),
        call(6, "ind_accessible", sides=["front"]),
        call(7, "ind_face_into_room"),
        call(8, "ind_not_block", fixed_object_type="door"),
        call(9, "ind_close_to_fixed_object", fixed_object_type="window", max_dist=1.6),
        call(10, "ind_not_block", fixed_object_type="door"),
        call(11, "ind_next_to_wall"),
    ]
    inter_calls = [
        call(0, "pair_adjacent", "bed", side="left"),
        call(1, "pair_adjacent", "bed", side="right"),
        call(2, "pair_aligned_with", "nightstand 1"),
        call(3, "pair_near", "dresser", max_dist=0.8),
        call(4, "pair_near", "wardrobe", max_dist=1.5),
    ]
    tertiary_calls = [
        call(0, "ter_above", "bed"),
        call(1, "ter_under", "bed"),
        call(2, "ind_central"),
    ]
    tag = lambda pairs: J(
        {"constraints": [{"subject": s, "sentence": t} for s, t in pairs]}
    )
    return {
        "room_params": [J(room)],
        "zones": [J({"zones": [{"label": z} for z in ("sleeping", "storage", "dressing")]})],
        "primary": [J({"objects": [
            {"name": "bed", "width": 1.6, "length": 2.0, "zone": "sleeping"},
            {"name": "wardrobe", "width": 2.2, "length": 0.7, "zone": "storage"},
            {"name": "dresser", "width": 1.0, "length": 0.45, "zone": "dressing"},
        ]})],
        "secondary": [J({"objects": [
            {"name": "nightstand", "width": 0.45, "length": 0.45, "zone": "sleeping", "count": 2},
            {"name": "bench", "width": 1.1, "length": 0.4, "zone": "storage"},
            {"name": "chair", "width": 0.5, "length": 0.5, "zone": "dressing"},
        ]})],
        "tertiary": [J({"objects": [
            {"name": "painting", "width": 0.9, "length": 0.05, "attach": "wall",
             "constraint": "hang the painting above the bed"},
            {"name": "rug", "width": 2.0, "length": 1.5, "attach": "floor",
             "constraint": "lay the rug under the bed"},
            {"name": "ceiling lamp", "width": 0.4, "length": 0.4, "attach": "ceiling",
             "constraint": "center the ceiling lamp in the room"},
        ]})],
        "styles": [J({"room": "calm scandinavian, light oak and off-white", "objects": [
            {"name": "bed", "style": "light oak frame, white linen"},
            {"name": "wardrobe", "style": "white lacquer, brass handles"},
            {"name": "dresser", "style": "light oak, six drawers"},
            {"name": "nightstand 1", "style": "light oak cube"},
            {"name": "nightstand 2", "style": "light oak cube"},
            {"name": "bench", "style": "oak slats, wool cushion"},
            {"name": "chair", "style": "bent plywood"},
            {"name": "painting", "style": "abstract print, thin black frame"},
            {"name": "rug", "style": "pale grey wool"},
            {"name": "ceiling lamp", "style": "paper globe"},
        ]})],
        "intra": [tag(intra)],
        "inter": [tag(inter)],
        "clean": [tag(cleaned_intra), tag(inter)],
        "translate": [
            J({"calls": intra_calls}),
            J({"calls": inter_calls}),
            J({"calls": tertiary_calls}),
        ],
    }


def vampire_bedroom() -> dict[str, list[str]]:
    """Two-zone windowless variant exercising a brief with no windows."""
    room = {
        "width": 3.5,
        "length": 4.5,
        "height": 3.2,
        "doors": [{"wall": "east", "offset": 1.0, "width": 0.9}],
        "windows": [],
        "sockets": [{"wall": "north", "offset": 1.5}],
    }
    intra = [
        ("coffin", "keep the coffin well away from the door"),
        ("coffin", "place the coffin against a wall"),
        ("altar", "the altar must stand against a wall"),
        ("altar", "the altar must face into the room"),
        ("altar", "keep the front of the altar accessible"),
    ]
    inter = [
        ("candle stand 1", "keep candle stand 1 within a meter of the altar"),
        ("candle stand 2", "keep candle stand 2 within a meter of the altar"),
    ]
    call = lambda k, fn, obj2=None, **params: {
        "sentence": k, "function": fn, "object2": obj2, "params": params,
    }
    tag = lambda pairs: J(
        {"constraints": [{"subject": s, "sentence": t} for s, t in pairs]}
    )
    return {
        "room_params": [J(room)],
        "zones": [J({"zones": [{"label": "resting"}, {"label": "ritual"}]})],
        "primary": [J({"objects": [
            {"name": "coffin", "width": 0.8, "length": 2.0, "zone": "resting"},
            {"name": "altar", "width": 1.4, "length": 0.6, "zone": "ritual"},
        ]})],
        "secondary": [J({"objects": [
            {"name": "candle stand", "width": 0.35, "length": 0.35, "zone": "ritual", "count": 2},
        ]})],
        "tertiary": [J({"objects": [
            {"name": "tapestry", "width": 1.2, "length": 0.05, "attach": "wall",
             "constraint": "hang the tapestry above the coffin"},
            {"name": "chandelier", "width": 0.5, "length": 0.5, "attach": "ceiling",
             "constraint": "center the chandelier in the room"},
        ]})],
        "styles": [J({"room": "gothic, black velvet and wrought iron", "objects": [
            {"name": "coffin", "style": "ebony, silk lining"},
            {"name": "altar", "style": "black marble"},
            {"name": "candle stand 1", "style": "wrought iron"},
            {"name": "candle stand 2", "style": "wrought iron"},
            {"name": "tapestry", "style": "crimson damask"},
            {"name": "chandelier", "style": "wrought iron, black candles"},
        ]})],
        "intra": [tag(intra)],
        "inter": [tag(inter)],
        "clean": [tag(intra), tag(inter)],
        "translate": [
            J({"calls": [
                call(0, "ind_away_from_fixed_object", fixed_object_type="door", min_dist=1.5),
                call(1, "ind_next_to_wall"),
                call(2, "ind_next_to_wall"),
                call(3, "ind_face_into_room"),
                call(4, "ind_accessible", sides=["front"]),
            ]}),
            J({"calls": [
                call(0, "pair_near", "altar", max_dist=1.0),
                call(1, "pair_near", "altar", max_dist=1.0),
            ]}),
            J({"calls": [
                call(0, "ter_above", "coffin"),
                call(1, "ind_central"),
            ]}),
        ],
    }


def record(prompt: str, scenario: dict[str, list[str]], path: Path) -> None:
    store = TranscriptStore()
    provider = RecordingProvider(CannedProvider(scenario), store)
    result = elicit_graph(provider, BriefRequest(prompt=prompt))
    issues = validate_graph(result.graph)
    if issues or result.diagnostics:
        raise SystemExit(
            f"{path.name}: scenario is not clean\n"
            f"  graph issues: {issues}\n  diagnostics: {result.diagnostics}"
        )
    path.parent.mkdir(parents=True, exist_ok=True)
    store.save(path)
    graph = result.graph
    tiers = [sum(o.tier == t for o in graph.objects) for t in ("primary", "secondary", "tertiary")]
    print(
        f"{path.name}: {len(store.records)} exchanges, "
        f"P/S/T = {tiers[0]}/{tiers[1]}/{tiers[2]}, "
        f"{len(graph.calls)} constraint calls"
    )


def main() -> int:
    record(BEDROOM_PROMPT, bedroom_4x5(), ROOT / "fixtures" / "bedroom_4x5.jsonl")
    record(VAMPIRE_PROMPT, vampire_bedroom(), ROOT / "fixtures" / "vampire_bedroom.jsonl")
    return 0


if __name__ == "__main__":
    sys.exit(main())
