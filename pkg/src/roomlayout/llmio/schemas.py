"""JSON schemas the language model's output must satisfy, per stage.

Each stage demands a single JSON object.  A response failing validation gets
one repair round-trip quoting the error back; persistent failures abort the
stage.
"""

from __future__ import annotations

STAGES = (
    "room_params",
    "zones",
    "primary",
    "secondary",
    "tertiary",
    "styles",
    "intra",
    "inter",
    "clean",
    "translate",
)

MAX_ZONES = 5

_WALL = {"type": "string", "enum": ["south", "north", "east", "west"]}
_POS = {"type": "number", "exclusiveMinimum": 0}
_NONNEG = {"type": "number", "minimum": 0}
_NAME = {"type": "string", "minLength": 1}

_OPENING = {
    "type": "object",
    "properties": {"wall": _WALL, "offset": _NONNEG, "width": _POS},
    "required": ["wall", "offset", "width"],
    "additionalProperties": False,
}

_SOCKET = {
    "type": "object",
    "properties": {"wall": _WALL, "offset": _NONNEG},
    "required": ["wall", "offset"],
    "additionalProperties": False,
}

_TAGGED_SENTENCE = {
    "type": "object",
    "properties": {"subject": _NAME, "sentence": _NAME},
    "required": ["subject", "sentence"],
    "additionalProperties": False,
}

STAGE_SCHEMAS: dict[str, dict] = {
    "room_params": {
        "type": "object",
        "properties": {
            "width": _POS,
            "length": _POS,
            "height": _POS,
            "doors": {"type": "array", "items": _OPENING},
            "windows": {"type": "array", "items": _OPENING},
            "sockets": {"type": "array", "items": _SOCKET},
        },
        "required": ["width", "length"],
        "additionalProperties": False,
    },
    "zones": {
        "type": "object",
        "properties": {
            "zones": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {"label": _NAME},
                    "required": ["label"],
                    "additionalProperties": False,
                },
                "minItems": 1,
                "maxItems": MAX_ZONES,
            }
        },
        "required": ["zones"],
        "additionalProperties": False,
    },
    "primary": {
        "type": "object",
        "properties": {
            "objects": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {
                        "name": _NAME,
                        "width": _POS,
                        "length": _POS,
                        "zone": _NAME,
                    },
                    "required": ["name", "width", "length", "zone"],
                    "additionalProperties": False,
                },
                "minItems": 1,
            }
        },
        "required": ["objects"],
        "additionalProperties": False,
    },
    "secondary": {
        "type": "object",
        "properties": {
            "objects": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {
                        "name": _NAME,
                        "width": _POS,
                        "length": _POS,
                        "zone": _NAME,
                        "count": {"type": "integer", "minimum": 1},
                    },
                    "required": ["name", "width", "length", "zone"],
                    "additionalProperties": False,
                },
            }
        },
        "required": ["objects"],
        "additionalProperties": False,
    },
    "tertiary": {
        "type": "object",
        "properties": {
            "objects": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {
                        "name": _NAME,
                        "width": _POS,
                        "length": _POS,
                        "attach": {
                            "type": "string",
                            "enum": ["floor", "wall", "ceiling", "surface"],
                        },
                        "constraint": _NAME,
                    },
                    "required": ["name", "width", "length", "attach", "constraint"],
                    "additionalProperties": False,
                },
            }
        },
        "required": ["objects"],
        "additionalProperties": False,
    },
    "styles": {
        "type": "object",
        "properties": {
            "room": {"type": "string"},
            "objects": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {"name": _NAME, "style": {"type": "string"}},
                    "required": ["name", "style"],
                    "additionalProperties": False,
                },
            },
        },
        "required": ["room", "objects"],
        "additionalProperties": False,
    },
    "intra": {
        "type": "object",
        "properties": {
            "constraints": {"type": "array", "items": _TAGGED_SENTENCE}
        },
        "required": ["constraints"],
        "additionalProperties": False,
    },
    "inter": {
        "type": "object",
        "properties": {
            "constraints": {"type": "array", "items": _TAGGED_SENTENCE}
        },
        "required": ["constraints"],
        "additionalProperties": False,
    },
    "clean": {
        "type": "object",
        "properties": {
            "constraints": {"type": "array", "items": _TAGGED_SENTENCE}
        },
        "required": ["constraints"],
        "additionalProperties": False,
    },
    "translate": {
        "type": "object",
        "properties": {
            "calls": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {
                        "sentence": {"type": "integer", "minimum": 0},
                        "function": _NAME,
                        "object2": {"type": ["string", "null"]},
                        "params": {"type": "object"},
                    },
                    "required": ["sentence", "function"],
                    "additionalProperties": False,
                },
            }
        },
        "required": ["calls"],
        "additionalProperties": False,
    },
}
